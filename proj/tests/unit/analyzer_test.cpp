#include <gtest/gtest.h>

#include <algorithm>

#include "dedc/analyzer.hpp"
#include "dedc/parser.hpp"
#include "dedc/pipeline.hpp"

using namespace dedc;

namespace {

FrontendResult front(std::string_view src) { return run_frontend(src); }

std::string errors(const FrontendResult& r) {
    std::string out;
    for (const auto& d : r.diagnostics)
        if (d.is_error()) out += d.message + "\n";
    return out;
}

bool mentions(const FrontendResult& r, const std::string& needle) { return errors(r).find(needle) != std::string::npos; }

Rule rule_of(std::string_view src) {
    auto p = parse_program(src);
    EXPECT_TRUE(p.ok());
    return p->rules.at(0);
}

}  // namespace

TEST(Analyzer, StandardLibraryParams) {
    const auto& defs = standard_io_definitions();
    ASSERT_EQ(defs.size(), 5u);
    auto find = [&](const std::string& n) {
        return *std::find_if(defs.begin(), defs.end(), [&](const IoDefinition& d) { return d.name == n; });
    };
    EXPECT_EQ(find("digitalRead").params[0].mode, ParamMode::Read);
    EXPECT_EQ(find("digitalRead").params[1].mode, ParamMode::Set);
    EXPECT_EQ(find("digitalRead").params[1].declared_type, ValueType::Int);
    EXPECT_EQ(find("millis").params[0].declared_type, ValueType::ULong);
    EXPECT_EQ(find("digitalWrite").params[1].mode, ParamMode::Read);
}

TEST(Analyzer, ClassifiesRules) {
    EXPECT_EQ(*classify_rule(rule_of("p :- q.")).value, RuleKind::Deductive);
    EXPECT_EQ(*classify_rule(rule_of("p@next :- q.")).value, RuleKind::Inductive);
    EXPECT_EQ(*classify_rule(rule_of("#pinOut(13) :- q.")).value, RuleKind::Output);
    EXPECT_EQ(*classify_rule(rule_of("now(T)@next :- #millis(T).")).value, RuleKind::Input);
    EXPECT_EQ(*classify_rule(rule_of("p(V)@next :- q, #digitalRead(2, V), V > 0.")).value, RuleKind::Input);
    EXPECT_FALSE(classify_rule(rule_of("p(T) :- #millis(T).")).value);
    EXPECT_FALSE(classify_rule(rule_of("p(T)@next :- #millis(T), q.")).value);
    EXPECT_FALSE(classify_rule(rule_of("#pinOut(13) :- #millis(T).")).value);
    EXPECT_FALSE(classify_rule(rule_of("p@next :- !#millis(T).")).value);
}

TEST(Analyzer, Safety) {
    EXPECT_TRUE(check_safety(rule_of("p(A) :- q(A).")).empty());
    EXPECT_FALSE(check_safety(rule_of("p(A) :- q(B).")).empty());
    EXPECT_FALSE(check_safety(rule_of("p :- q, !r(A).")).empty());
    EXPECT_FALSE(check_safety(rule_of("p :- q(A), A < B.")).empty());
    EXPECT_FALSE(check_safety(rule_of("p :- A < 1, q(A).")).empty());
}

TEST(Analyzer, InputBindingRewritesBoundSetArguments) {
    auto def = parse_io_definition("#digitalRead(P, Val) = {int Val = digitalRead(#P);}");
    auto binding = analyze_io_binding(rule_of("pressed@next :- #digitalRead(2, #HIGH)."), *def.value);
    ASSERT_TRUE(binding.ok());
    EXPECT_EQ(to_source(binding->rule), "pressed@next :- #digitalRead(2, V), V == #HIGH.");
    ASSERT_EQ(binding->step.args.size(), 2u);
    EXPECT_EQ(binding->step.args[1].mode, ParamMode::Set);

    auto bound = analyze_io_binding(rule_of("same(V)@next :- level(V), #digitalRead(2, V)."), *def.value);
    ASSERT_TRUE(bound.ok());
    EXPECT_EQ(to_source(bound->rule), "same(V)@next :- level(V), #digitalRead(2, V1), V1 == V.");

    auto unbound_read = analyze_io_binding(rule_of("p(V)@next :- #digitalRead(P, V)."), *def.value);
    EXPECT_FALSE(unbound_read.ok());
}

TEST(Analyzer, OutputHeadCannotUseSetParameter) {
    auto r = front("#digitalRead(2, X) :- level(X).\n.decl level(int)");
    EXPECT_TRUE(mentions(r, "cannot appear in a rule head"));
}

TEST(Analyzer, Stratification) {
    auto cyclic = front(".decl p\n.decl q\np :- !q.\nq :- p.");
    EXPECT_FALSE(cyclic.ok());
    EXPECT_TRUE(mentions(cyclic, "negation cycle"));
    EXPECT_TRUE(mentions(cyclic, "p -> q -> !p"));

    auto layered = front(".decl a\n.decl b\n.decl c\na@0.\nb :- a.\nc :- !b, a.\n#pinOut(13) :- c.");
    ASSERT_TRUE(layered.ok()) << errors(layered);
    const auto& s = layered.analyzed->strata;
    EXPECT_EQ(s.predicate_strata.at("b"), 0);
    EXPECT_EQ(s.predicate_strata.at("c"), 1);
    EXPECT_EQ(s.max_stratum, 1);
    EXPECT_EQ(layered.analyzed->rules[2].stratum, 1);
    EXPECT_EQ(layered.analyzed->deductive_strata(), (std::vector<int>{0, 1}));
}

TEST(Analyzer, NegationThroughInductionIsFine) {
    auto r = front(".decl p\np@next :- !p.");
    EXPECT_TRUE(r.ok()) << errors(r);
}

TEST(Analyzer, TypeChecks) {
    EXPECT_TRUE(mentions(front(".decl a(int)\n.decl b(byte)\nb(X) :- a(X)."), "has type int"));
    EXPECT_TRUE(mentions(front(".decl a(byte)\nb :- a(300).\n.decl b"), "does not fit"));
    EXPECT_TRUE(mentions(front(".decl a(int)\na(70000)@0."), "does not fit"));
    EXPECT_TRUE(mentions(front(".decl a(int)\na(1, 2)@0."), "expects 1"));
    EXPECT_TRUE(mentions(front("b :- a."), "undeclared"));
    EXPECT_TRUE(mentions(front(".decl a\n#nope(1) :- a."), "unknown IO predicate"));
    EXPECT_TRUE(mentions(front(".decl t(int)\nt(T)@next :- #millis(T)."), "has type unsigned long"));
}

TEST(Analyzer, SetVariableTypeFromHeadWhenDefinitionIsUntyped) {
    auto r = front(".decl v(int)\n#sense(X) = {float X = 2.5;}\nv(X)@next :- #sense(X).");
    ASSERT_TRUE(r.ok()) << errors(r);
    EXPECT_EQ(r.analyzed->rules[0].var_types.at("X"), ValueType::Int);
    auto bad = front(".decl v\n#sense(X) = {float X = 2.5;}\nv@next :- #sense(X), X > 1.");
    EXPECT_TRUE(mentions(bad, "cannot infer the type"));
}

TEST(Analyzer, NameRules) {
    EXPECT_TRUE(mentions(front(".decl a\n.decl a"), "more than once"));
    EXPECT_TRUE(mentions(front(".decl insert_x"), "collides"));
    EXPECT_TRUE(mentions(front(".decl ded_state"), "collides"));
    EXPECT_TRUE(mentions(front("#millis(T) = {unsigned long T = 5;}"), "duplicate definition"));
}

TEST(Analyzer, PlansAndPatterns) {
    auto r = front(".decl q(int)\n.decl p(int)\np(A) :- q(A), p(B), A < B.");
    ASSERT_TRUE(r.ok()) << errors(r);
    const RulePlan& plan = r.analyzed->rules[0];
    ASSERT_EQ(plan.steps.size(), 3u);
    EXPECT_EQ(std::get<ScanStep>(plan.steps[0]).pattern, "f");
    EXPECT_EQ(std::get<ScanStep>(plan.steps[1]).pattern, "f");
    EXPECT_EQ(std::get<GuardStep>(plan.steps[2]).domain, ArithDomain::Int16);
    EXPECT_EQ(plan.insert->pattern, "b");
    const auto& pats = r.analyzed->layout.binding_patterns;
    EXPECT_EQ(pats.at("p"), (std::set<std::string>{"b", "f"}));
    EXPECT_EQ(pats.at("q"), (std::set<std::string>{"b", "f"}));
}

TEST(Analyzer, RepeatedVariableInsideLiteral) {
    auto r = front(".decl e(int, int)\n.decl loop(int)\nloop(X) :- e(X, X).");
    ASSERT_TRUE(r.ok()) << errors(r);
    const auto& scan = std::get<ScanStep>(r.analyzed->rules[0].steps[0]);
    EXPECT_EQ(scan.pattern, "ff");
    EXPECT_EQ(scan.args[1].action, ArgAction::Check);
}

TEST(Analyzer, UnsignedDomainForLongOperands) {
    auto r = front(".decl now(unsigned long)\n.decl since(unsigned long)\n.decl go\ngo :- since(P), now(T), P + 1000 < T.");
    ASSERT_TRUE(r.ok()) << errors(r);
    EXPECT_EQ(std::get<GuardStep>(r.analyzed->rules[0].steps[2]).domain, ArithDomain::UInt32);
}

TEST(Analyzer, PredicateNumbersAndTooLargeFacts) {
    auto r = front(".decl a\n.decl b(int)\n.decl c(unsigned long, byte)");
    ASSERT_TRUE(r.ok());
    const auto& layout = r.analyzed->layout;
    EXPECT_EQ(layout.find("a")->number, 1);
    EXPECT_EQ(layout.find("c")->number, 3);
    EXPECT_EQ(layout.find("c")->fact_size, 6u);
    auto small = run_frontend(".decl c(unsigned long, byte)", AnalyzeOptions{4});
    EXPECT_FALSE(small.ok());

    std::string many;
    for (int i = 0; i < 256; ++i) many += ".decl p" + std::to_string(i) + "\n";
    EXPECT_TRUE(mentions(front(many), "too many predicates"));
}
