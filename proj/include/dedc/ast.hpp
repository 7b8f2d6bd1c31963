#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dedc {

struct SourceLoc {
    int line = 0;
    int column = 0;
};

// Locations only feed diagnostics; two nodes that differ only in position are the same node.
inline bool operator==(const SourceLoc&, const SourceLoc&) { return true; }

enum class ValueType : std::uint8_t { Byte, Int, ULong };

constexpr std::size_t value_width(ValueType t) {
    switch (t) {
        case ValueType::Byte: return 1;
        case ValueType::Int: return 2;
        case ValueType::ULong: return 4;
    }
    return 0;
}

std::string_view type_name(ValueType t);

/// Accepts `byte`, `int` and `unsigned long` (whitespace between the two words is normalized).
std::optional<ValueType> parse_type_name(std::string_view text);

/// Smallest and largest value storable in a column of type `t`.
std::int64_t min_value(ValueType t);
std::int64_t max_value(ValueType t);
inline bool representable(ValueType t, std::int64_t v) { return v >= min_value(t) && v <= max_value(t); }

struct Declaration {
    std::string name;
    std::vector<ValueType> arg_types;
    SourceLoc loc;

    bool operator==(const Declaration&) const = default;
};

/// Tag byte plus the packed arguments.
std::size_t fact_size(const Declaration& d);
std::size_t fact_size(const std::vector<ValueType>& arg_types);

struct Variable {
    std::string name;
    bool operator==(const Variable&) const = default;
};

struct IntegerConstant {
    std::int64_t value = 0;
    bool operator==(const IntegerConstant&) const = default;
};

/// `#NAME` in rule text; resolved through the board constant table or passed to C verbatim.
struct NamedConstant {
    std::string name;
    bool operator==(const NamedConstant&) const = default;
};

struct Term {
    std::variant<Variable, IntegerConstant, NamedConstant> value;
    SourceLoc loc;

    static Term var(std::string name, SourceLoc loc = {}) { return Term{Variable{std::move(name)}, loc}; }
    static Term integer(std::int64_t v, SourceLoc loc = {}) { return Term{IntegerConstant{v}, loc}; }
    static Term named(std::string name, SourceLoc loc = {}) { return Term{NamedConstant{std::move(name)}, loc}; }

    bool is_variable() const { return std::holds_alternative<Variable>(value); }
    bool is_integer() const { return std::holds_alternative<IntegerConstant>(value); }
    bool is_named() const { return std::holds_alternative<NamedConstant>(value); }
    const std::string& var_name() const { return std::get<Variable>(value).name; }
    std::int64_t integer_value() const { return std::get<IntegerConstant>(value).value; }
    const std::string& constant_name() const { return std::get<NamedConstant>(value).name; }

    bool operator==(const Term&) const = default;
};

enum class ArithOp : std::uint8_t { Add, Sub, Mul };
enum class CompareOp : std::uint8_t { Less, LessEq, Greater, GreaterEq, Equal, NotEqual };

std::string_view op_text(ArithOp op);
std::string_view op_text(CompareOp op);

/// Arithmetic expression tree: either a single term or a binary node with two children.
struct Expr {
    std::optional<Term> leaf;
    ArithOp op = ArithOp::Add;
    std::vector<Expr> children;

    static Expr of(Term t) {
        Expr e;
        e.leaf = std::move(t);
        return e;
    }
    static Expr binary(ArithOp op, Expr lhs, Expr rhs) {
        Expr e;
        e.op = op;
        e.children.push_back(std::move(lhs));
        e.children.push_back(std::move(rhs));
        return e;
    }
    bool is_leaf() const { return leaf.has_value(); }

    bool operator==(const Expr&) const = default;
};

struct Comparison {
    Expr lhs;
    CompareOp op = CompareOp::Less;
    Expr rhs;
    SourceLoc loc;

    bool operator==(const Comparison&) const = default;
};

struct Literal {
    std::string predicate;  // without the leading `#` for IO literals
    std::vector<Term> args;
    bool negated = false;
    bool is_io = false;
    SourceLoc loc;

    bool operator==(const Literal&) const = default;
};

using BodyItem = std::variant<Literal, Comparison>;

enum class RuleKind : std::uint8_t { Unclassified, Deductive, Inductive, Output, Input };
std::string_view kind_name(RuleKind k);

/// A `[name]` or `[name:arg]` prefix awaiting expansion.
struct MacroUse {
    std::string name;
    std::optional<std::string> argument;
    SourceLoc loc;

    bool operator==(const MacroUse&) const = default;
};

struct Rule {
    Literal head;
    std::vector<BodyItem> body;
    bool head_next = false;
    RuleKind kind = RuleKind::Unclassified;
    std::size_t source_index = 0;
    std::vector<MacroUse> pending_macros;
    SourceLoc loc;

    bool operator==(const Rule&) const = default;
};

struct Fact {
    std::string predicate;
    std::vector<std::int64_t> args;
    SourceLoc loc;

    bool operator==(const Fact&) const = default;
};

enum class ParamMode : std::uint8_t { Read, Set };

struct IoParam {
    std::string name;
    ParamMode mode = ParamMode::Read;
    /// C type of the declaration that sets this parameter, when it maps onto a value type.
    std::optional<ValueType> declared_type;

    bool operator==(const IoParam&) const = default;
};

struct IoDefinition {
    std::string name;  // leading `#` stripped
    std::vector<IoParam> params;
    std::string body;  // verbatim C text between the outer braces
    SourceLoc loc;

    bool operator==(const IoDefinition&) const = default;
};

struct Program {
    std::vector<Declaration> declarations;
    std::vector<IoDefinition> io_definitions;
    std::vector<Fact> facts;
    std::vector<Rule> rules;

    bool has_pending_macros() const;
    const Declaration* find_declaration(std::string_view name) const;

    bool operator==(const Program&) const = default;
};

// Canonical dialect syntax. Printing a program and parsing it back yields an equal Program.
std::string to_source(const Term& t);
std::string to_source(const Expr& e);
std::string to_source(const Comparison& c);
std::string to_source(const Literal& l);
std::string to_source(const Rule& r);
std::string to_source(const Fact& f);
std::string to_source(const Declaration& d);
std::string to_source(const IoDefinition& d);
std::string to_source(const Program& p);

/// Variables of a term/expression/literal in order of first occurrence.
void collect_variables(const Expr& e, std::vector<std::string>& out);
void collect_variables(const Literal& l, std::vector<std::string>& out);
std::vector<std::string> rule_variables(const Rule& r);

}  // namespace dedc
