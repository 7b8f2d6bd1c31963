#include <gtest/gtest.h>

#include "dedc/parser.hpp"

using namespace dedc;

namespace {

Program parse_ok(std::string_view src) {
    auto r = parse_program(src);
    EXPECT_TRUE(r.ok()) << (r.diagnostics.empty() ? "" : r.diagnostics[0].message);
    return *r.value;
}

std::string first_error(std::string_view src) {
    auto r = parse_program(src);
    for (const auto& d : r.diagnostics)
        if (d.is_error()) return d.message;
    return "";
}

}  // namespace

TEST(Parser, Declarations) {
    Program p = parse_ok(".decl setup\n.decl q(byte, int)\n.decl now(unsigned   long).\n");
    ASSERT_EQ(p.declarations.size(), 3u);
    EXPECT_TRUE(p.declarations[0].arg_types.empty());
    EXPECT_EQ(p.declarations[1].arg_types, (std::vector<ValueType>{ValueType::Byte, ValueType::Int}));
    EXPECT_EQ(p.declarations[2].arg_types, std::vector<ValueType>{ValueType::ULong});
    EXPECT_EQ(fact_size(p.declarations[1]), 4u);
}

TEST(Parser, FactsRulesAndComments) {
    Program p = parse_ok(R"(
        .decl p(int)   // trailing comment
        p(-12)@0.
        p(A)@next :- p(A), !q(A, 3), A + 1 < 2 * A.
    )");
    ASSERT_EQ(p.facts.size(), 1u);
    EXPECT_EQ(p.facts[0].args, std::vector<std::int64_t>{-12});
    ASSERT_EQ(p.rules.size(), 1u);
    const Rule& r = p.rules[0];
    EXPECT_TRUE(r.head_next);
    ASSERT_EQ(r.body.size(), 3u);
    EXPECT_TRUE(std::get<Literal>(r.body[1]).negated);
    const auto& c = std::get<Comparison>(r.body[2]);
    EXPECT_EQ(c.op, CompareOp::Less);
    EXPECT_FALSE(c.lhs.is_leaf());
    EXPECT_EQ(c.rhs.op, ArithOp::Mul);
}

TEST(Parser, IoLiteralsAndNamedConstants) {
    Program p = parse_ok("pressed@next :- #digitalRead(2, #HIGH).\n#digitalWrite(13, #LOW) :- !pressed.");
    const auto& io = std::get<Literal>(p.rules[0].body[0]);
    EXPECT_TRUE(io.is_io);
    EXPECT_EQ(io.predicate, "digitalRead");
    EXPECT_TRUE(io.args[1].is_named());
    EXPECT_EQ(io.args[1].constant_name(), "HIGH");
    EXPECT_TRUE(p.rules[1].head.is_io);
}

TEST(Parser, IoDefinitionClassification) {
    Program p = parse_ok("#readTemp(S, V) = { int V = analogRead(#S); }\n#beep(P) = {tone(#P, 440);}");
    ASSERT_EQ(p.io_definitions.size(), 2u);
    const auto& t = p.io_definitions[0];
    EXPECT_EQ(t.params[0].mode, ParamMode::Read);
    EXPECT_EQ(t.params[1].mode, ParamMode::Set);
    EXPECT_EQ(t.params[1].declared_type, ValueType::Int);
    EXPECT_EQ(p.io_definitions[1].params[0].mode, ParamMode::Read);
}

TEST(Parser, IoDefinitionSetTypes) {
    auto d = parse_io_definition("#now(T) = {unsigned long T = millis();}");
    ASSERT_TRUE(d.ok());
    EXPECT_EQ(d->params[0].declared_type, ValueType::ULong);
    auto b = parse_io_definition("#sense(X) = {uint8_t X = 3;}");
    ASSERT_TRUE(b.ok());
    EXPECT_EQ(b->params[0].declared_type, ValueType::Byte);
    auto other = parse_io_definition("#f(X) = {float X = 1.5;}");
    ASSERT_TRUE(other.ok());
    EXPECT_EQ(other->params[0].mode, ParamMode::Set);
    EXPECT_FALSE(other->params[0].declared_type.has_value());
}

TEST(Parser, IoParamNeitherReadNorSet) {
    auto d = parse_io_definition("#f(X) = {foo();}");
    EXPECT_FALSE(d.ok());
}

TEST(Parser, MacrosAreRecorded) {
    Program p = parse_ok("[setup]#pinOut(13).\n[delay:1000]turn_on :- turn_off.");
    ASSERT_EQ(p.rules.size(), 2u);
    EXPECT_EQ(p.rules[0].pending_macros[0].name, "setup");
    EXPECT_TRUE(p.rules[0].body.empty());
    EXPECT_EQ(p.rules[1].pending_macros[0].argument, "1000");
    EXPECT_TRUE(p.has_pending_macros());
}

TEST(Parser, FactsOnlyAtTimestampZero) {
    EXPECT_EQ(first_error(".decl p(int)\np(1)@3."), "facts allowed at timestamp 0 only");
    EXPECT_NE(first_error("p(X)@0."), "");
    EXPECT_NE(first_error("p(1)."), "");
}

TEST(Parser, ReportsPositionsAndRecovers) {
    auto r = parse_program(".decl p(int)\np(A :- q(A).\np(1)@0.\nq(B) :- r(B) B.\n");
    ASSERT_FALSE(r.ok());
    std::vector<int> lines;
    for (const auto& d : r.diagnostics) lines.push_back(d.line);
    EXPECT_EQ(lines, (std::vector<int>{2, 4}));
    EXPECT_EQ(r.value->facts.size(), 1u);
}

TEST(Parser, RejectsBadSyntax) {
    EXPECT_NE(first_error(".decl P(int)"), "");
    EXPECT_NE(first_error(".decl p(float)"), "");
    EXPECT_EQ(first_error("p :- q, A = 1."), "use '==' for equality");
    EXPECT_NE(first_error("p :- q(x)."), "");
    EXPECT_NE(first_error("!p :- q."), "");
    EXPECT_NE(first_error("p :- q(99999999999)."), "");
    EXPECT_NE(first_error("#f(X) = {int X = 1;}\n#f(Y) = {int Y = 2;}"), "");
}

TEST(Parser, RoundTripsThroughCanonicalText) {
    const char* src = R"(
.decl p(int)
.decl q(byte, int)
#beep(P) = {tone(#P, 440);}
p(1000)@0.
q(42, 12)@0.
p(A) :- q(B, A), !p(B), A - (B - 1) < 0 - A * 2.
p(V)@next :- #digitalRead(2, V), V != #HIGH.
#beep(A) :- p(A).
[delay:5]p(A) :- q(A, A).
)";
    Program first = parse_ok(src);
    std::string text = to_source(first);
    Program second = parse_ok(text);
    EXPECT_EQ(first, second);
    EXPECT_EQ(to_source(second), text);
}
