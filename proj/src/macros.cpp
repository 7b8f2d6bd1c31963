#include "dedc/macros.hpp"

#include <algorithm>
#include <charconv>

namespace dedc {

namespace {

Literal plain(std::string predicate, std::vector<Term> args, SourceLoc loc) {
    Literal l;
    l.predicate = std::move(predicate);
    l.args = std::move(args);
    l.loc = loc;
    return l;
}

std::string fresh_name(const std::vector<std::string>& taken, const std::string& base) {
    auto used = [&](const std::string& n) { return std::find(taken.begin(), taken.end(), n) != taken.end(); };
    if (!used(base)) return base;
    for (int i = 1;; ++i) {
        std::string candidate = base + std::to_string(i);
        if (!used(candidate)) return candidate;
    }
}

}  // namespace

bool MacroExpander::declare(const Declaration& d, RewriteSet& out, std::vector<Diagnostic>& diags,
                            const char* purpose) {
    const Declaration* existing = program_.find_declaration(d.name);
    if (!existing) {
        for (const auto& a : added_decls_)
            if (a.name == d.name) existing = &a;
    }
    if (existing) {
        if (existing->arg_types != d.arg_types) {
            diags.push_back(Diagnostic::error(d.loc, std::string(purpose) + " needs '" + to_source(d) +
                                                         "' but the program declares '" + to_source(*existing) + "'"));
            return false;
        }
        return true;
    }
    added_decls_.push_back(d);
    out.declarations.push_back(d);
    return true;
}

void MacroExpander::add_fact(Fact f, RewriteSet& out) {
    auto same = [&](const Fact& other) { return other.predicate == f.predicate && other.args == f.args; };
    if (std::any_of(program_.facts.begin(), program_.facts.end(), same)) return;
    if (std::any_of(added_facts_.begin(), added_facts_.end(), same)) return;
    added_facts_.push_back(f);
    out.facts.push_back(std::move(f));
}

Checked<RewriteSet> MacroExpander::expand_setup(const Rule& rule) {
    Checked<RewriteSet> result;
    RewriteSet out;
    SourceLoc loc = rule.pending_macros.empty() ? rule.loc : rule.pending_macros.front().loc;
    if (!declare(Declaration{"setup", {}, loc}, out, result.diagnostics, "the setup macro")) return result;
    add_fact(Fact{"setup", {}, loc}, out);

    Rule rewritten = rule;
    rewritten.pending_macros.clear();
    rewritten.body.emplace_back(plain("setup", {}, loc));
    out.rules.push_back(std::move(rewritten));
    result.value = std::move(out);
    return result;
}

Checked<RewriteSet> MacroExpander::expand_delay(const Rule& rule, std::uint32_t delay_ms) {
    Checked<RewriteSet> result;
    auto& diags = result.diagnostics;
    SourceLoc loc = rule.pending_macros.empty() ? rule.loc : rule.pending_macros.front().loc;
    if (rule.head.is_io) {
        diags.push_back(Diagnostic::error(loc, "the delay macro needs a regular predicate as head, not #" + rule.head.predicate));
        return result;
    }
    if (rule.head_next) {
        diags.push_back(Diagnostic::error(loc, "the delay macro cannot be combined with an @next head"));
        return result;
    }
    const Declaration* head_decl = program_.find_declaration(rule.head.predicate);
    if (!head_decl) {
        diags.push_back(Diagnostic::error(rule.head.loc, "the delay macro needs a declaration of '" + rule.head.predicate + "'"));
        return result;
    }

    RewriteSet out;
    const std::string delayed = "delayed_" + rule.head.predicate;
    Declaration delayed_decl{delayed, head_decl->arg_types, loc};
    delayed_decl.arg_types.push_back(ValueType::ULong);
    bool ok = declare(Declaration{"now", {ValueType::ULong}, loc}, out, diags, "the delay macro");
    ok = declare(delayed_decl, out, diags, "the delay macro") && ok;
    if (!ok) return result;
    if (!delayed_heads_.insert(delayed).second) {
        diags.push_back(Diagnostic::warning(
            loc, "several delay macros on '" + rule.head.predicate + "' share the predicate " + delayed));
    }
    add_fact(Fact{"now", {0}, loc}, out);

    if (!emitted_time_reader_) {
        emitted_time_reader_ = true;
        Rule reader;
        reader.head = plain("now", {Term::var("T", loc)}, loc);
        reader.head_next = true;
        Literal millis = plain("millis", {Term::var("T", loc)}, loc);
        millis.is_io = true;
        reader.body.emplace_back(std::move(millis));
        reader.loc = loc;
        out.rules.push_back(std::move(reader));
    }

    const auto taken = rule_variables(rule);
    const std::string curr = fresh_name(taken, "Curr");
    const std::string await = fresh_name(taken, "Await");
    auto with_time = [&](const std::string& var) {
        std::vector<Term> args = rule.head.args;
        args.push_back(Term::var(var, loc));
        return args;
    };
    auto now_lit = [&] { return plain("now", {Term::var(curr, loc)}, loc); };
    auto deadline = [&](CompareOp op) {
        Comparison c;
        c.lhs = Expr::binary(ArithOp::Add, Expr::of(Term::var(await, loc)),
                             Expr::of(Term::integer(static_cast<std::int64_t>(delay_ms), loc)));
        c.op = op;
        c.rhs = Expr::of(Term::var(curr, loc));
        c.loc = loc;
        return c;
    };

    // delayed_head(Args, Curr) :- body, now(Curr).
    Rule record;
    record.head = plain(delayed, with_time(curr), loc);
    record.body = rule.body;
    record.body.emplace_back(now_lit());
    record.loc = rule.loc;

    // head(Args) :- delayed_head(Args, Await), now(Curr), Await + X <= Curr.
    Rule fire;
    fire.head = rule.head;
    fire.body.emplace_back(plain(delayed, with_time(await), loc));
    fire.body.emplace_back(now_lit());
    fire.body.emplace_back(deadline(CompareOp::LessEq));
    fire.loc = rule.loc;

    // delayed_head(Args, Await)@next :- delayed_head(Args, Await), now(Curr), Await + X > Curr.
    Rule carry;
    carry.head = plain(delayed, with_time(await), loc);
    carry.head_next = true;
    carry.body.emplace_back(plain(delayed, with_time(await), loc));
    carry.body.emplace_back(now_lit());
    carry.body.emplace_back(deadline(CompareOp::Greater));
    carry.loc = rule.loc;

    out.rules.push_back(std::move(record));
    out.rules.push_back(std::move(fire));
    out.rules.push_back(std::move(carry));
    result.value = std::move(out);
    return result;
}

Checked<Program> expand_macros(const Program& program) {
    Checked<Program> result;
    if (!program.has_pending_macros()) {
        result.value = program;
        return result;
    }

    MacroExpander expander(program);
    Program out = program;
    out.rules.clear();
    std::vector<std::string> generated;  // canonical text of every rule the expander produced
    std::vector<std::size_t> user_rules;

    auto take = [&](Checked<RewriteSet>& rs) {
        for (auto& d : rs.diagnostics) result.diagnostics.push_back(std::move(d));
        if (!rs.value) return;
        for (auto& d : rs->declarations) out.declarations.push_back(std::move(d));
        for (auto& f : rs->facts) out.facts.push_back(std::move(f));
        for (auto& r : rs->rules) {
            std::string text = to_source(r);
            if (std::find(generated.begin(), generated.end(), text) != generated.end()) continue;
            generated.push_back(std::move(text));
            out.rules.push_back(std::move(r));
        }
    };

    for (const Rule& rule : program.rules) {
        if (rule.pending_macros.empty()) {
            user_rules.push_back(out.rules.size());
            out.rules.push_back(rule);
            continue;
        }
        if (rule.pending_macros.size() > 1) {
            result.diagnostics.push_back(Diagnostic::error(rule.pending_macros[1].loc, "at most one macro per rule"));
            continue;
        }
        const MacroUse& m = rule.pending_macros.front();
        if (m.name == "setup") {
            if (m.argument) {
                result.diagnostics.push_back(Diagnostic::error(m.loc, "the setup macro takes no argument"));
                continue;
            }
            auto rs = expander.expand_setup(rule);
            take(rs);
        } else if (m.name == "delay") {
            std::uint32_t ms = 0;
            const std::string arg = m.argument.value_or("");
            auto [end, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), ms);
            if (arg.empty() || ec != std::errc{} || end != arg.data() + arg.size() || ms == 0) {
                result.diagnostics.push_back(Diagnostic::error(
                    m.loc, "malformed delay argument '" + arg + "' (expected a positive number of milliseconds)"));
                continue;
            }
            auto rs = expander.expand_delay(rule, ms);
            take(rs);
        } else {
            result.diagnostics.push_back(Diagnostic::error(m.loc, "unknown macro '" + m.name + "'"));
        }
    }

    for (std::size_t i : user_rules) {
        const Rule& r = out.rules[i];
        if (std::find(generated.begin(), generated.end(), to_source(r)) != generated.end())
            result.diagnostics.push_back(
                Diagnostic::warning(r.loc, "rule duplicates one generated by macro expansion: " + to_source(r)));
    }

    for (std::size_t i = 0; i < out.rules.size(); ++i) out.rules[i].source_index = i;
    result.value = std::move(out);
    return result;
}

}  // namespace dedc
