#include "dedc/analyzer.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "dedc/parser.hpp"

namespace dedc {

namespace {

constexpr std::string_view kStandardLibrary = R"(#pinIn(P)  = {pinMode(#P, INPUT);}
#pinOut(P) = {pinMode(#P, OUTPUT);}
#digitalWrite(P, Val) = {digitalWrite(#P, #Val);}
#digitalRead(P, Val) = {int Val = digitalRead(#P);}
#millis(T) = {unsigned long T = millis();}
)";

std::string quote(const std::string& s) { return "'" + s + "'"; }

/// Index of the rule's IO literal in the body, or -1.
int body_io_index(const Rule& r) {
    for (std::size_t i = 0; i < r.body.size(); ++i)
        if (const auto* l = std::get_if<Literal>(&r.body[i]); l && l->is_io) return static_cast<int>(i);
    return -1;
}

const Literal* io_literal(const Rule& r) {
    if (r.head.is_io) return &r.head;
    int i = body_io_index(r);
    return i < 0 ? nullptr : &std::get<Literal>(r.body[i]);
}

std::string fresh_variable(const Rule& r, const std::string& base) {
    auto taken = rule_variables(r);
    for (int i = 0;; ++i) {
        std::string name = i == 0 ? base : base + std::to_string(i);
        if (std::find(taken.begin(), taken.end(), name) == taken.end()) return name;
    }
}

bool reserved_predicate_name(const std::string& n) {
    return n == "insert" || n == "size_of" || n.rfind("insert_", 0) == 0 || n.rfind("size_of_", 0) == 0 ||
           n.rfind("ded_", 0) == 0;
}

}  // namespace

std::string_view standard_library_source() { return kStandardLibrary; }

const std::vector<IoDefinition>& standard_io_definitions() {
    static const std::vector<IoDefinition> defs = [] {
        auto parsed = parse_program(kStandardLibrary);
        return parsed->io_definitions;
    }();
    return defs;
}

std::vector<int> AnalyzedProgram::deductive_strata() const {
    std::set<int> s;
    for (const auto& r : rules)
        if (r.kind == RuleKind::Deductive) s.insert(r.stratum);
    return {s.begin(), s.end()};
}

Checked<RuleKind> classify_rule(const Rule& rule) {
    Checked<RuleKind> result;
    auto& diags = result.diagnostics;
    int io_count = rule.head.is_io ? 1 : 0;
    for (const auto& item : rule.body) {
        if (const auto* l = std::get_if<Literal>(&item); l && l->is_io) {
            ++io_count;
            if (l->negated) diags.push_back(Diagnostic::error(l->loc, "IO literal #" + l->predicate + " cannot be negated"));
        }
    }
    if (io_count > 1) {
        diags.push_back(Diagnostic::error(rule.loc, "a rule may contain at most one IO literal"));
        return result;
    }
    if (!diags.empty()) return result;

    if (rule.head.is_io) {
        if (rule.head_next) {
            diags.push_back(Diagnostic::error(rule.head.loc, "an IO head cannot be marked @next"));
            return result;
        }
        result.value = RuleKind::Output;
        return result;
    }
    int io_at = body_io_index(rule);
    if (!rule.head_next) {
        if (io_at >= 0) {
            const auto& l = std::get<Literal>(rule.body[io_at]);
            diags.push_back(Diagnostic::error(
                l.loc, "IO literal #" + l.predicate + " in the body of a deductive rule (input rules need an @next head)"));
            return result;
        }
        result.value = RuleKind::Deductive;
        return result;
    }
    if (io_at < 0) {
        result.value = RuleKind::Inductive;
        return result;
    }
    for (std::size_t i = io_at + 1; i < rule.body.size(); ++i) {
        if (std::holds_alternative<Literal>(rule.body[i])) {
            const auto& l = std::get<Literal>(rule.body[io_at]);
            diags.push_back(Diagnostic::error(
                l.loc, "IO literal #" + l.predicate + " must be the last subgoal of an input rule"));
            return result;
        }
    }
    result.value = RuleKind::Input;
    return result;
}

std::vector<Diagnostic> check_safety(const Rule& rule, const IoDefinition* io) {
    std::vector<Diagnostic> diags;
    std::set<std::string> bound;
    auto require = [&](const Term& t, const std::string& where) {
        if (t.is_variable() && !bound.count(t.var_name()))
            diags.push_back(Diagnostic::error(t.loc, "variable " + t.var_name() + " is unbound " + where));
    };
    auto require_expr = [&](const Expr& e, const std::string& where, auto& self) -> void {
        if (e.is_leaf()) {
            require(*e.leaf, where);
            return;
        }
        for (const auto& c : e.children) self(c, where, self);
    };

    for (const auto& item : rule.body) {
        if (const auto* c = std::get_if<Comparison>(&item)) {
            require_expr(c->lhs, "in comparison", require_expr);
            require_expr(c->rhs, "in comparison", require_expr);
            continue;
        }
        const auto& l = std::get<Literal>(item);
        if (l.is_io) {
            for (std::size_t i = 0; i < l.args.size(); ++i) {
                bool sets = io && i < io->params.size() && io->params[i].mode == ParamMode::Set;
                if (sets && l.args[i].is_variable()) bound.insert(l.args[i].var_name());
            }
            continue;
        }
        if (l.negated) {
            for (const auto& t : l.args) require(t, "under negation in !" + l.predicate);
            continue;
        }
        for (const auto& t : l.args)
            if (t.is_variable()) bound.insert(t.var_name());
    }
    for (const auto& t : rule.head.args) require(t, "in the head of the rule");
    return diags;
}

Checked<Stratification> stratify(const std::vector<Rule>& rules) {
    Checked<Stratification> result;
    struct Edge {
        std::string from, to;
        bool negative;
    };
    std::vector<Edge> edges;
    std::set<std::string> nodes;
    for (const auto& r : rules) {
        if (r.kind != RuleKind::Deductive) continue;
        nodes.insert(r.head.predicate);
        for (const auto& item : r.body) {
            if (const auto* l = std::get_if<Literal>(&item)) {
                edges.push_back({l->predicate, r.head.predicate, l->negated});
                nodes.insert(l->predicate);
            }
        }
    }

    // Tarjan's SCC; a negative edge inside one component is an unstratifiable cycle.
    std::map<std::string, int> index, low, component;
    std::vector<std::string> stack;
    std::set<std::string> on_stack;
    int counter = 0, components = 0;
    std::function<void(const std::string&)> visit = [&](const std::string& v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack.insert(v);
        for (const auto& e : edges) {
            if (e.from != v) continue;
            if (!index.count(e.to)) {
                visit(e.to);
                low[v] = std::min(low[v], low[e.to]);
            } else if (on_stack.count(e.to)) {
                low[v] = std::min(low[v], index[e.to]);
            }
        }
        if (low[v] == index[v]) {
            std::string w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack.erase(w);
                component[w] = components;
            } while (w != v);
            ++components;
        }
    };
    for (const auto& n : nodes)
        if (!index.count(n)) visit(n);

    for (const auto& e : edges) {
        if (!e.negative || component[e.from] != component[e.to]) continue;
        // Walk back from the negated predicate to the head to name the cycle.
        std::map<std::string, std::string> parent;
        std::vector<std::string> frontier{e.to};
        parent[e.to] = e.to;
        while (!frontier.empty() && !parent.count(e.from)) {
            std::vector<std::string> next;
            for (const auto& v : frontier)
                for (const auto& f : edges)
                    if (f.from == v && component[f.to] == component[e.to] && !parent.count(f.to)) {
                        parent[f.to] = v;
                        next.push_back(f.to);
                    }
            frontier = std::move(next);
        }
        std::vector<std::string> path{e.from};
        for (std::string v = e.from; v != e.to;) {
            v = parent[v];
            path.push_back(v);
        }
        std::reverse(path.begin(), path.end());
        std::string cycle;
        for (const auto& p : path) cycle += p + " -> ";
        cycle += "!" + e.to;
        SourceLoc loc;
        for (const auto& r : rules)
            if (r.kind == RuleKind::Deductive && r.head.predicate == e.to) loc = r.loc;
        result.diagnostics.push_back(Diagnostic::error(loc, "negation cycle among deductive rules: " + cycle));
        return result;
    }

    Stratification s;
    for (const auto& n : nodes) s.predicate_strata[n] = 0;
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& e : edges) {
            int need = s.predicate_strata[e.from] + (e.negative ? 1 : 0);
            if (s.predicate_strata[e.to] < need) {
                s.predicate_strata[e.to] = need;
                changed = true;
            }
        }
    }
    auto stratum_of = [&](const std::string& p) {
        auto it = s.predicate_strata.find(p);
        return it == s.predicate_strata.end() ? 0 : it->second;
    };
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const Rule& r = rules[i];
        if (r.kind == RuleKind::Deductive) {
            s.rule_strata[i] = stratum_of(r.head.predicate);
        } else if (r.kind == RuleKind::Output) {
            int st = 0;
            for (const auto& item : r.body)
                if (const auto* l = std::get_if<Literal>(&item))
                    st = std::max(st, stratum_of(l->predicate) + (l->negated ? 1 : 0));
            s.rule_strata[i] = st;
        } else {
            continue;
        }
        s.max_stratum = std::max(s.max_stratum, s.rule_strata[i]);
    }
    result.value = std::move(s);
    return result;
}

Checked<IoBinding> analyze_io_binding(const Rule& rule, const IoDefinition& def) {
    Checked<IoBinding> result;
    auto& diags = result.diagnostics;
    const Literal* lit = io_literal(rule);
    if (!lit) {
        diags.push_back(Diagnostic::error(rule.loc, "rule has no IO literal"));
        return result;
    }
    if (lit->args.size() != def.params.size()) {
        diags.push_back(Diagnostic::error(lit->loc, "#" + def.name + " expects " + std::to_string(def.params.size()) +
                                                        " arguments, got " + std::to_string(lit->args.size())));
        return result;
    }

    IoBinding out{rule, {0, def.name, {}}};
    if (rule.head.is_io) {
        for (std::size_t i = 0; i < def.params.size(); ++i) {
            const IoParam& p = def.params[i];
            if (p.mode == ParamMode::Set) {
                diags.push_back(Diagnostic::error(lit->args[i].loc, "parameter " + p.name + " of #" + def.name +
                                                                        " is set by its definition and cannot appear in a rule head"));
                continue;
            }
            out.step.args.push_back({p.name, ParamMode::Read, lit->args[i], std::nullopt});
        }
        if (!has_errors(diags)) result.value = std::move(out);
        return result;
    }

    const int at = body_io_index(rule);
    std::set<std::string> bound;
    for (int i = 0; i < at; ++i)
        if (const auto* l = std::get_if<Literal>(&rule.body[i]); l && !l->negated)
            for (const auto& t : l->args)
                if (t.is_variable()) bound.insert(t.var_name());

    Literal rewritten = *lit;
    std::vector<BodyItem> guards;
    std::set<std::string> set_here;
    for (std::size_t i = 0; i < def.params.size(); ++i) {
        const IoParam& p = def.params[i];
        Term arg = lit->args[i];
        if (p.mode == ParamMode::Read) {
            if (arg.is_variable() && !bound.count(arg.var_name())) {
                diags.push_back(Diagnostic::error(arg.loc, "variable " + arg.var_name() + " read by #" + def.name +
                                                               " (parameter " + p.name + ") must be bound by an earlier literal"));
            }
            out.step.args.push_back({p.name, ParamMode::Read, arg, std::nullopt});
            continue;
        }
        bool fresh_binding = arg.is_variable() && !bound.count(arg.var_name()) && !set_here.count(arg.var_name());
        if (!fresh_binding) {
            // p(A) with A already known compiles as p(A'), A' == A.
            Rule scratch = out.rule;
            std::get<Literal>(scratch.body[at]) = rewritten;
            Term var = Term::var(fresh_variable(scratch, "V"), arg.loc);
            rewritten.args[i] = var;
            Comparison eq;
            eq.lhs = Expr::of(var);
            eq.op = CompareOp::Equal;
            eq.rhs = Expr::of(arg);
            eq.loc = arg.loc;
            guards.emplace_back(std::move(eq));
            arg = var;
        }
        set_here.insert(arg.var_name());
        out.step.args.push_back({p.name, ParamMode::Set, arg, p.declared_type});
    }
    if (has_errors(diags)) return result;

    std::get<Literal>(out.rule.body[at]) = rewritten;
    out.rule.body.insert(out.rule.body.begin() + at + 1, guards.begin(), guards.end());
    result.value = std::move(out);
    return result;
}

Checked<CompileLayout> number_predicates(const Program& program, std::size_t buffer_size) {
    Checked<CompileLayout> result;
    if (program.declarations.size() > kMaxPredicates) {
        result.diagnostics.push_back(Diagnostic::error(
            program.declarations[kMaxPredicates].loc,
            "too many predicates: " + std::to_string(program.declarations.size()) + " declared, at most 255 fit the tag byte"));
        return result;
    }
    CompileLayout layout;
    layout.buffer_size = buffer_size;
    for (std::size_t i = 0; i < program.declarations.size(); ++i) {
        const Declaration& d = program.declarations[i];
        std::size_t size = fact_size(d);
        if (size > kMaxFactSize) {
            result.diagnostics.push_back(Diagnostic::error(
                d.loc, "facts of " + d.name + " take " + std::to_string(size) + " bytes; at most 255 are supported"));
        } else if (size > buffer_size) {
            result.diagnostics.push_back(Diagnostic::error(
                d.loc, "facts of " + d.name + " take " + std::to_string(size) + " bytes but a buffer holds only " +
                           std::to_string(buffer_size)));
        }
        layout.predicates.push_back({d.name, static_cast<std::uint8_t>(i + 1), d.arg_types, size});
    }
    result.value = std::move(layout);
    return result;
}

namespace {

class Analyzer {
public:
    Analyzer(const Program& program, const AnalyzeOptions& options, std::vector<Diagnostic>& diags)
        : program_(program), options_(options), diags_(diags) {}

    std::optional<AnalyzedProgram> run() {
        AnalyzedProgram out;
        out.program = program_;
        if (program_.has_pending_macros()) {
            for (const auto& r : program_.rules)
                if (!r.pending_macros.empty()) error(r.pending_macros.front().loc, "macro not expanded");
            return std::nullopt;
        }

        check_names();
        auto layout = number_predicates(program_, options_.buffer_size);
        append(layout.diagnostics);
        if (!layout.value) return std::nullopt;
        out.layout = std::move(*layout.value);
        layout_ = &out.layout;

        out.io_definitions = standard_io_definitions();
        for (const auto& def : program_.io_definitions) {
            bool clash = std::any_of(out.io_definitions.begin(), out.io_definitions.end(),
                                     [&](const IoDefinition& d) { return d.name == def.name; });
            if (clash) {
                error(def.loc, "duplicate definition of IO predicate #" + def.name);
                continue;
            }
            out.io_definitions.push_back(def);
        }
        io_ = &out.io_definitions;

        check_facts();

        std::vector<Rule> classified;
        for (const Rule& r : program_.rules) {
            RulePlan plan;
            plan.rule = r;
            if (!check_literals(r)) {
                out.rules.push_back(std::move(plan));
                classified.push_back(r);
                continue;
            }
            auto kind = classify_rule(r);
            append(kind.diagnostics);
            if (kind.value) {
                plan.kind = *kind.value;
                plan.rule.kind = plan.kind;
                build_plan(plan);
            }
            classified.push_back(plan.rule);
            out.rules.push_back(std::move(plan));
        }
        if (has_errors(diags_)) return std::nullopt;

        auto strata = stratify(classified);
        append(strata.diagnostics);
        if (!strata.value) return std::nullopt;
        out.strata = std::move(*strata.value);
        for (std::size_t i = 0; i < out.rules.size(); ++i) {
            auto it = out.strata.rule_strata.find(i);
            if (it != out.strata.rule_strata.end()) out.rules[i].stratum = it->second;
            out.program.rules[i] = out.rules[i].rule;
            out.program.rules[i].kind = out.rules[i].kind;
        }
        for (const auto& p : out.layout.predicates) out.layout.register_pattern(p.name, CompileLayout::all_bound(p.arity()));
        if (has_errors(diags_)) return std::nullopt;
        return out;
    }

private:
    void error(SourceLoc loc, std::string msg) { diags_.push_back(Diagnostic::error(loc, std::move(msg))); }
    void append(const std::vector<Diagnostic>& ds) { diags_.insert(diags_.end(), ds.begin(), ds.end()); }

    void check_names() {
        std::set<std::string> seen;
        for (const auto& d : program_.declarations) {
            if (!seen.insert(d.name).second) error(d.loc, "predicate " + d.name + " is declared more than once");
            if (reserved_predicate_name(d.name))
                error(d.loc, "predicate name " + d.name + " collides with generated access functions (insert_, size_of_, ded_)");
        }
        for (const auto& def : program_.io_definitions)
            if (seen.count(def.name)) error(def.loc, "#" + def.name + " is both declared and defined as an IO predicate");
    }

    const IoDefinition* find_io(const std::string& name) const {
        for (const auto& d : *io_)
            if (d.name == name) return &d;
        return nullptr;
    }
    std::size_t io_index(const std::string& name) const {
        for (std::size_t i = 0; i < io_->size(); ++i)
            if ((*io_)[i].name == name) return i;
        return 0;
    }

    void check_constant(const Term& t, ValueType type, const std::string& pred) {
        if (t.is_integer() && !representable(type, t.integer_value()))
            error(t.loc, "constant " + std::to_string(t.integer_value()) + " does not fit " + std::string(type_name(type)) +
                             " argument of " + pred);
    }

    void check_facts() {
        for (const auto& f : program_.facts) {
            const PredicateLayout* p = layout_->find(f.predicate);
            if (!p) {
                error(f.loc, "fact for undeclared predicate " + f.predicate);
                continue;
            }
            if (p->arity() != f.args.size()) {
                error(f.loc, f.predicate + " expects " + std::to_string(p->arity()) + " arguments, got " +
                                 std::to_string(f.args.size()));
                continue;
            }
            for (std::size_t i = 0; i < f.args.size(); ++i)
                if (!representable(p->arg_types[i], f.args[i]))
                    error(f.loc, "constant " + std::to_string(f.args[i]) + " does not fit " +
                                     std::string(type_name(p->arg_types[i])) + " argument of " + f.predicate);
        }
    }

    bool check_literal(const Literal& l) {
        if (l.is_io) {
            const IoDefinition* def = find_io(l.predicate);
            if (!def) {
                error(l.loc, "unknown IO predicate #" + l.predicate);
                return false;
            }
            if (def->params.size() != l.args.size()) {
                error(l.loc, "#" + l.predicate + " expects " + std::to_string(def->params.size()) + " arguments, got " +
                                 std::to_string(l.args.size()));
                return false;
            }
            return true;
        }
        const PredicateLayout* p = layout_->find(l.predicate);
        if (!p) {
            error(l.loc, "undeclared predicate " + l.predicate);
            return false;
        }
        if (p->arity() != l.args.size()) {
            error(l.loc, l.predicate + " expects " + std::to_string(p->arity()) + " arguments, got " +
                             std::to_string(l.args.size()));
            return false;
        }
        for (std::size_t i = 0; i < l.args.size(); ++i) check_constant(l.args[i], p->arg_types[i], l.predicate);
        return true;
    }

    bool check_literals(const Rule& r) {
        bool ok = check_literal(r.head);
        for (const auto& item : r.body)
            if (const auto* l = std::get_if<Literal>(&item)) ok = check_literal(*l) && ok;
        return ok;
    }

    void type_use(RulePlan& plan, const Term& t, ValueType column, const std::string& pred) {
        if (!t.is_variable()) return;
        auto it = plan.var_types.find(t.var_name());
        if (it == plan.var_types.end()) {
            plan.var_types[t.var_name()] = column;
        } else if (it->second != column) {
            error(t.loc, "variable " + t.var_name() + " has type " + std::string(type_name(it->second)) + " but is used as " +
                             std::string(type_name(column)) + " argument of " + pred);
        }
    }

    void build_plan(RulePlan& plan) {
        const IoDefinition* def = nullptr;
        if (const Literal* io = io_literal(plan.rule)) def = find_io(io->predicate);
        append(check_safety(plan.rule, def));

        std::optional<IoStep> io_step;
        if (def) {
            auto binding = analyze_io_binding(plan.rule, *def);
            append(binding.diagnostics);
            if (!binding.value) return;
            plan.rule = binding->rule;
            io_step = binding->step;
            io_step->definition = io_index(def->name);
        }
        if (has_errors(diags_)) return;

        std::set<std::string> bound;
        for (const auto& item : plan.rule.body) {
            if (const auto* c = std::get_if<Comparison>(&item)) {
                auto type_of = [&](const std::string& v) -> std::optional<ValueType> {
                    auto it = plan.var_types.find(v);
                    if (it == plan.var_types.end()) return std::nullopt;
                    return it->second;
                };
                plan.steps.push_back(GuardStep{*c, comparison_domain(*c, type_of)});
                continue;
            }
            const auto& l = std::get<Literal>(item);
            if (l.is_io) {
                IoStep step = *io_step;
                for (auto& a : step.args) {
                    if (a.mode != ParamMode::Set) continue;
                    if (!a.var_type) a.var_type = head_type_of(plan.rule, a.term.var_name());
                    if (!a.var_type) {
                        error(a.term.loc, "cannot infer the type of " + a.term.var_name() + " set by #" + step.name +
                                              "; declare parameter " + a.param + " as byte, int or unsigned long in the definition");
                        continue;
                    }
                    plan.var_types[a.term.var_name()] = *a.var_type;
                    bound.insert(a.term.var_name());
                }
                plan.steps.push_back(std::move(step));
                continue;
            }
            const PredicateLayout& pred = *layout_->find(l.predicate);
            std::vector<PlannedArg> args;
            std::string pattern;
            std::set<std::string> seen_here;
            for (std::size_t i = 0; i < l.args.size(); ++i) {
                const Term& t = l.args[i];
                PlannedArg a{t, ArgAction::Constant, pred.arg_types[i]};
                if (t.is_variable()) {
                    if (bound.count(t.var_name())) {
                        a.action = ArgAction::Bound;
                    } else if (seen_here.count(t.var_name())) {
                        a.action = ArgAction::Check;
                    } else {
                        a.action = ArgAction::Bind;
                        seen_here.insert(t.var_name());
                    }
                    type_use(plan, t, pred.arg_types[i], l.predicate);
                }
                pattern += (a.action == ArgAction::Constant || a.action == ArgAction::Bound) ? 'b' : 'f';
                args.push_back(std::move(a));
            }
            if (pattern.empty()) pattern = "x";
            if (l.negated) {
                plan.steps.push_back(ProbeStep{l.predicate, pred.number, CompileLayout::all_bound(pred.arity()), std::move(args)});
            } else {
                for (const auto& v : seen_here) bound.insert(v);
                layout_->register_pattern(l.predicate, pattern);
                plan.steps.push_back(ScanStep{l.predicate, pred.number, pattern, std::move(args)});
            }
        }

        if (plan.kind == RuleKind::Output) {
            plan.action = *io_step;
            return;
        }
        const PredicateLayout& head = *layout_->find(plan.rule.head.predicate);
        HeadInsert insert{head.name, head.number, CompileLayout::all_bound(head.arity()), {}};
        for (std::size_t i = 0; i < plan.rule.head.args.size(); ++i) {
            const Term& t = plan.rule.head.args[i];
            type_use(plan, t, head.arg_types[i], head.name);
            insert.args.push_back({t, t.is_variable() ? ArgAction::Bound : ArgAction::Constant, head.arg_types[i]});
        }
        plan.insert = std::move(insert);
    }

    std::optional<ValueType> head_type_of(const Rule& r, const std::string& var) const {
        if (r.head.is_io) return std::nullopt;
        const PredicateLayout* p = layout_->find(r.head.predicate);
        for (std::size_t i = 0; p && i < r.head.args.size(); ++i)
            if (r.head.args[i].is_variable() && r.head.args[i].var_name() == var) return p->arg_types[i];
        return std::nullopt;
    }

    const Program& program_;
    const AnalyzeOptions& options_;
    std::vector<Diagnostic>& diags_;
    CompileLayout* layout_ = nullptr;
    const std::vector<IoDefinition>* io_ = nullptr;
};

}  // namespace

Checked<AnalyzedProgram> analyze(const Program& program, const AnalyzeOptions& options) {
    Checked<AnalyzedProgram> result;
    Analyzer analyzer(program, options, result.diagnostics);
    result.value = analyzer.run();
    return result;
}

}  // namespace dedc
