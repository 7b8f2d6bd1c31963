#include <gtest/gtest.h>

#include <algorithm>

#include "dedc/macros.hpp"
#include "dedc/parser.hpp"

using namespace dedc;

namespace {

Checked<Program> expand(std::string_view src) {
    auto parsed = parse_program(src);
    EXPECT_TRUE(parsed.ok());
    return expand_macros(*parsed.value);
}

std::vector<std::string> rule_texts(const Program& p) {
    std::vector<std::string> out;
    for (const auto& r : p.rules) out.push_back(to_source(r));
    return out;
}

bool has_error(const std::vector<Diagnostic>& ds, const std::string& needle) {
    return std::any_of(ds.begin(), ds.end(),
                       [&](const Diagnostic& d) { return d.is_error() && d.message.find(needle) != std::string::npos; });
}

}  // namespace

TEST(Macros, MacroFreeProgramIsUnchanged) {
    auto parsed = parse_program(".decl a\na@0.\nb :- a.");
    auto r = expand_macros(*parsed.value);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(*r.value, *parsed.value);
}

TEST(Macros, SetupAppendsLiteralAndSupportItemsOnce) {
    auto r = expand(".decl on\n[setup]#pinOut(13).\n[setup]on :- #X == 1.");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(rule_texts(*r), (std::vector<std::string>{"#pinOut(13) :- setup.", "on :- #X == 1, setup."}));
    EXPECT_EQ(std::count_if(r->declarations.begin(), r->declarations.end(),
                            [](const Declaration& d) { return d.name == "setup"; }),
              1);
    ASSERT_EQ(r->facts.size(), 1u);
    EXPECT_EQ(to_source(r->facts[0]), "setup@0.");
}

TEST(Macros, SetupReusesMatchingUserDeclaration) {
    auto r = expand(".decl setup\nsetup@0.\n[setup]#pinOut(13).");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r->declarations.size(), 1u);
    EXPECT_EQ(r->facts.size(), 1u);
}

TEST(Macros, DelayProducesTheDelayedFactRules) {
    auto r = expand(".decl a(int)\n.decl b(int)\n[delay:1000]a(X) :- b(X).");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(rule_texts(*r), (std::vector<std::string>{
                                  "now(T)@next :- #millis(T).",
                                  "delayed_a(X, Curr) :- b(X), now(Curr).",
                                  "a(X) :- delayed_a(X, Await), now(Curr), Await + 1000 <= Curr.",
                                  "delayed_a(X, Await)@next :- delayed_a(X, Await), now(Curr), Await + 1000 > Curr.",
                              }));
    const Declaration* delayed = r->find_declaration("delayed_a");
    ASSERT_NE(delayed, nullptr);
    EXPECT_EQ(delayed->arg_types, (std::vector<ValueType>{ValueType::Int, ValueType::ULong}));
    ASSERT_NE(r->find_declaration("now"), nullptr);
    EXPECT_EQ(r->find_declaration("now")->arg_types, std::vector<ValueType>{ValueType::ULong});
    ASSERT_EQ(r->facts.size(), 1u);
    EXPECT_EQ(to_source(r->facts[0]), "now(0)@0.");
}

TEST(Macros, FreshNamesAvoidUserVariables) {
    auto r = expand(".decl a(int)\n.decl b(int, int)\n[delay:5]a(Curr) :- b(Curr, Await).");
    ASSERT_TRUE(r.ok());
    auto texts = rule_texts(*r);
    EXPECT_EQ(texts[1], "delayed_a(Curr, Curr1) :- b(Curr, Await), now(Curr1).");
}

TEST(Macros, TimeReaderEmittedOnceForSeveralDelays) {
    auto r = expand(".decl a\n.decl b\n[delay:10]a :- b.\n[delay:20]b :- a.");
    ASSERT_TRUE(r.ok());
    auto texts = rule_texts(*r);
    EXPECT_EQ(std::count(texts.begin(), texts.end(), "now(T)@next :- #millis(T)."), 1);
    EXPECT_EQ(texts.size(), 7u);
}

TEST(Macros, Errors) {
    EXPECT_TRUE(has_error(expand("[delay:10]#pinOut(13) :- a.").diagnostics, "regular predicate"));
    EXPECT_TRUE(has_error(expand(".decl a\n.decl b\n[delay:10]a@next :- b.").diagnostics, "@next"));
    EXPECT_TRUE(has_error(expand(".decl b\n[delay:10]a :- b.").diagnostics, "declaration"));
    EXPECT_FALSE(expand(".decl a\n.decl b\n[delay:0]a :- b.").ok());
    EXPECT_FALSE(expand(".decl a\n.decl b\n[delay:abc]a :- b.").ok());
    EXPECT_TRUE(has_error(expand(".decl a\n[teleport]a :- a.").diagnostics, "unknown macro"));
    EXPECT_TRUE(has_error(expand(".decl a\n[setup][setup]a.").diagnostics, "at most one macro"));
    EXPECT_FALSE(expand(".decl now(int)\n.decl a\n.decl b\n[delay:10]a :- b.").ok());
    EXPECT_FALSE(expand(".decl setup(int)\n[setup]#pinOut(13).").ok());
}

TEST(Macros, ConciseBlinkExpandsToElevenRules) {
    auto r = expand(R"(
.decl turn_on
.decl turn_off
[setup]#pinOut(13).
[delay:1000]turn_on :- turn_off.
#digitalWrite(13, #HIGH) :- turn_on.
[setup]turn_off.
[delay:1000]turn_off :- turn_on.
#digitalWrite(13, #LOW) :- turn_off.
)");
    ASSERT_TRUE(r.ok());
    EXPECT_FALSE(r->has_pending_macros());
    EXPECT_EQ(r->rules.size(), 11u);
    for (std::size_t i = 0; i < r->rules.size(); ++i) EXPECT_EQ(r->rules[i].source_index, i);
}
