#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "dedc/ast.hpp"
#include "dedc/diagnostic.hpp"

namespace dedc {

/// Items a single macro use contributes. `rules` replace the macro-prefixed rule in place.
struct RewriteSet {
    std::vector<Rule> rules;
    std::vector<Declaration> declarations;
    std::vector<Fact> facts;
};

/// Rewrites `[setup]` and `[delay:X]` prefixed rules into plain rules. Support declarations and facts
/// (`setup`, `now`, `delayed_<head>`) are emitted once per program; the expander remembers what it
/// already added, so one instance expands one program.
class MacroExpander {
public:
    explicit MacroExpander(const Program& program) : program_(program) {}

    /// `[setup]head :- body.` becomes `head :- body, setup.`
    Checked<RewriteSet> expand_setup(const Rule& rule);

    /// `[delay:X]head(Args) :- body.` becomes the delayed-fact rules, carrying the head's arguments
    /// plus the time the body held in `delayed_<head>`.
    Checked<RewriteSet> expand_delay(const Rule& rule, std::uint32_t delay_ms);

private:
    bool declare(const Declaration& d, RewriteSet& out, std::vector<Diagnostic>& diags, const char* purpose);
    void add_fact(Fact f, RewriteSet& out);

    const Program& program_;
    std::vector<Declaration> added_decls_;
    std::vector<Fact> added_facts_;
    bool emitted_time_reader_ = false;
    std::set<std::string> delayed_heads_;
};

/// Expands every pending macro. Generated rules take the place of the rule that spawned them, so the
/// relative order of user rules is preserved. A macro-free program is returned unchanged.
Checked<Program> expand_macros(const Program& program);

}  // namespace dedc
