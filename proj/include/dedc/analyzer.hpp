#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dedc/arith.hpp"
#include "dedc/ast.hpp"
#include "dedc/diagnostic.hpp"
#include "dedc/layout.hpp"

namespace dedc {

/// Source of the IO predicates every program can use without defining them.
std::string_view standard_library_source();
const std::vector<IoDefinition>& standard_io_definitions();

// ---------------------------------------------------------------------------------------------
// Evaluation plans. A rule body is executed left to right as a chain of steps; each step either
// scans facts (binding variables), probes for absence, tests a comparison, or runs an IO action.
// The simulator interprets these plans and the code generator prints them as nested C blocks.

enum class ArgAction : std::uint8_t {
    Constant,  // integer or #NAME; part of the search key
    Bound,     // variable bound by an earlier step; part of the search key
    Bind,      // first occurrence; read from the found fact
    Check,     // repeated inside the same literal; read and compared
};

struct PlannedArg {
    Term term;
    ArgAction action = ArgAction::Constant;
    ValueType type = ValueType::Int;  // column type
};

struct ScanStep {
    std::string predicate;
    std::uint8_t number = 0;
    std::string pattern;
    std::vector<PlannedArg> args;
};

struct ProbeStep {  // negated literal, every argument bound
    std::string predicate;
    std::uint8_t number = 0;
    std::string pattern;
    std::vector<PlannedArg> args;
};

struct GuardStep {
    Comparison comparison;
    ArithDomain domain = ArithDomain::Int16;
};

struct IoArg {
    std::string param;
    ParamMode mode = ParamMode::Read;
    Term term;                           // for Set params always a variable that is unbound here
    std::optional<ValueType> var_type;  // type given to a Set variable
};

struct IoStep {
    std::size_t definition = 0;  // index into AnalyzedProgram::io_definitions
    std::string name;
    std::vector<IoArg> args;
};

using PlanStep = std::variant<ScanStep, ProbeStep, GuardStep, IoStep>;

struct HeadInsert {
    std::string predicate;
    std::uint8_t number = 0;
    std::string pattern;  // all bound; used for the duplicate check
    std::vector<PlannedArg> args;
};

struct RulePlan {
    Rule rule;  // after the IO binding rewrite
    RuleKind kind = RuleKind::Unclassified;
    int stratum = 0;  // deductive and output rules
    std::vector<PlanStep> steps;
    std::optional<HeadInsert> insert;  // deductive, inductive and input rules
    std::optional<IoStep> action;      // output rules
    std::map<std::string, ValueType> var_types;
};

struct Stratification {
    std::map<std::string, int> predicate_strata;  // predicates not defined deductively sit in 0
    std::map<std::size_t, int> rule_strata;       // rule index -> stratum (deductive and output)
    int max_stratum = 0;
};

struct AnalyzedProgram {
    Program program;                         // macro-free, kinds assigned
    std::vector<IoDefinition> io_definitions;  // standard library first, then user definitions
    CompileLayout layout;
    Stratification strata;
    std::vector<RulePlan> rules;  // program order

    /// Ascending list of strata that own at least one deductive rule.
    std::vector<int> deductive_strata() const;
    const IoDefinition& io(const IoStep& s) const { return io_definitions.at(s.definition); }
};

struct AnalyzeOptions {
    std::size_t buffer_size = kDefaultBufferSize;
};

/// Full analysis of a macro-expanded program.
Checked<AnalyzedProgram> analyze(const Program& program, const AnalyzeOptions& options = {});

/// Assigns the rule kind from the shape of head and body.
Checked<RuleKind> classify_rule(const Rule& rule);

/// Range restriction: head variables and variables under negation or in comparisons must be bound
/// by an earlier positive literal (or set by the rule's IO literal). `io` is the definition of the
/// rule's IO literal, if any.
std::vector<Diagnostic> check_safety(const Rule& rule, const IoDefinition* io = nullptr);

/// Strata over deductive and output rules; rules must already carry their kind.
Checked<Stratification> stratify(const std::vector<Rule>& rules);

struct IoBinding {
    Rule rule;  // set parameters bound to constants or bound variables become fresh variables plus a trailing `==`
    IoStep step;
};

/// Checks an input or output rule's IO literal against its definition and rewrites the input case.
Checked<IoBinding> analyze_io_binding(const Rule& rule, const IoDefinition& def);

/// Numbers declared predicates from 1 in declaration order.
Checked<CompileLayout> number_predicates(const Program& program, std::size_t buffer_size = kDefaultBufferSize);

}  // namespace dedc
