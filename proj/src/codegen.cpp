#include "dedc/codegen.hpp"

#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace dedc {

namespace {

const std::set<std::string>& reserved_identifiers() {
    static const std::set<std::string> names{
        "HIGH", "LOW", "INPUT", "OUTPUT", "INPUT_PULLUP", "LED_BUILTIN", "NULL", "DED_BUFFER_SIZE", "A0", "A1",
        "A2",   "A3",  "A4",    "A5",     "A6",           "A7",          "PI",   "HALF_PI",         "TWO_PI", "DEG_TO_RAD",
        "RAD_TO_DEG", "EULER", "SERIAL", "DISPLAY", "LSBFIRST", "MSBFIRST", "CHANGE", "FALLING", "RISING", "DEFAULT",
        "EXTERNAL", "INTERNAL", "F_CPU", "_Bool"};
    return names;
}

std::string type_suffix(ValueType t) {
    switch (t) {
        case ValueType::Byte: return "byte";
        case ValueType::Int: return "int";
        case ValueType::ULong: return "ulong";
    }
    return "int";
}

std::string number_const(const std::string& pred) { return "ded_pred_" + pred; }

std::string integer_text(std::int64_t v) {
    if (v < 0) return "(" + std::to_string(v) + ")";
    if (v > 32767) return std::to_string(v) + "UL";
    return std::to_string(v);
}

/// Collects the identifiers a block of C text uses so rule variables can avoid them.
std::set<std::string> identifiers_in(const std::string& text) {
    std::set<std::string> out;
    static const std::regex word(R"([A-Za-z_]\w*)");
    for (auto it = std::sregex_iterator(text.begin(), text.end(), word); it != std::sregex_iterator(); ++it)
        out.insert(it->str());
    return out;
}

class Writer {
public:
    void line(const std::string& s) { out_ << std::string(indent_ * 2, ' ') << s << '\n'; }
    void open(const std::string& s) {
        line(s);
        ++indent_;
    }
    void close(const std::string& s = "}") {
        --indent_;
        line(s);
    }
    void raw(const std::string& s) { out_ << s; }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
    int indent_ = 0;
};

class RuleEmitter {
public:
    RuleEmitter(const AnalyzedProgram& program, const RulePlan& rule) : program_(program), rule_(rule) {
        std::set<std::string> taken = reserved_identifiers();
        auto io_words = [&](const IoStep& s) {
            const IoDefinition& def = program_.io(s);
            auto words = identifiers_in(def.body);
            taken.insert(words.begin(), words.end());
            for (const auto& p : def.params) taken.insert(p.name);
        };
        for (const auto& step : rule.steps)
            if (const auto* io = std::get_if<IoStep>(&step)) io_words(*io);
        if (rule.action) io_words(*rule.action);

        for (const auto& v : rule_variables(rule.rule)) {
            std::string name = v;
            while (taken.count(name)) name += "_v";
            names_[v] = name;
        }
    }

    std::string emit(const std::string& function_name) {
        const bool output = rule_.kind == RuleKind::Output;
        w_.open((output ? "void " : "bool ") + function_name + "(void) {");
        if (!output) w_.line("bool inserted_facts = false;");
        emit_step(0);
        if (!output) w_.line("return inserted_facts;");
        w_.close();
        return w_.str();
    }

private:
    std::string var(const std::string& v) const { return names_.at(v); }

    std::string term(const Term& t) const {
        if (t.is_variable()) return var(t.var_name());
        if (t.is_named()) return t.constant_name();
        return integer_text(t.integer_value());
    }

    ValueType var_type(const std::string& v) const { return rule_.var_types.at(v); }

    std::string u32(const Expr& e) const {
        if (e.is_leaf()) {
            const Term& t = *e.leaf;
            if (t.is_variable() && var_type(t.var_name()) == ValueType::ULong) return var(t.var_name());
            return "(uint32_t)" + term(t);
        }
        return "(" + u32(e.children[0]) + " " + std::string(op_text(e.op)) + " " + u32(e.children[1]) + ")";
    }

    std::string expr(const Expr& e, ArithDomain d) const {
        if (d == ArithDomain::UInt32) return u32(e);
        if (e.is_leaf()) {
            const Term& t = *e.leaf;
            // keeps byte comparisons against negative bounds warning-free
            if (t.is_variable() && var_type(t.var_name()) == ValueType::Byte) return "ded_i16(" + term(t) + ")";
            return term(t);
        }
        return "ded_i16(" + u32(e) + ")";
    }

    /// Variables referenced at or after step `from` (or by the head / action).
    bool used_from(std::size_t from, const std::string& v) const {
        auto in_expr = [&](const Expr& e) {
            std::vector<std::string> vs;
            collect_variables(e, vs);
            return std::find(vs.begin(), vs.end(), v) != vs.end();
        };
        auto in_terms = [&](const auto& args) {
            for (const auto& a : args)
                if (a.term.is_variable() && a.term.var_name() == v) return true;
            return false;
        };
        for (std::size_t i = from; i < rule_.steps.size(); ++i) {
            const PlanStep& s = rule_.steps[i];
            if (const auto* g = std::get_if<GuardStep>(&s)) {
                if (in_expr(g->comparison.lhs) || in_expr(g->comparison.rhs)) return true;
            } else if (const auto* io = std::get_if<IoStep>(&s)) {
                for (const auto& a : io->args)
                    if (a.mode == ParamMode::Read && a.term.is_variable() && a.term.var_name() == v) return true;
            } else if (const auto* scan = std::get_if<ScanStep>(&s)) {
                if (in_terms(scan->args)) return true;
            } else if (in_terms(std::get<ProbeStep>(s).args)) {
                return true;
            }
        }
        if (rule_.insert && in_terms(rule_.insert->args)) return true;
        if (rule_.action)
            for (const auto& a : rule_.action->args)
                if (a.term.is_variable() && a.term.var_name() == v) return true;
        return false;
    }

    std::string cursor(const std::string& pred) {
        for (int n = 1;; ++n) {
            std::string name = pred + std::to_string(n);
            if (cursors_.insert(name).second) return name;
        }
    }

    std::string call_args(const std::vector<PlannedArg>& args, bool keys_only) const {
        std::string out;
        for (const auto& a : args) {
            if (keys_only && a.action != ArgAction::Constant && a.action != ArgAction::Bound) continue;
            out += ", " + term(a.term);
        }
        return out;
    }

    void emit_io(const IoStep& step) {
        const IoDefinition& def = program_.io(step);
        std::string body = def.body;
        for (std::size_t i = 0; i < step.args.size(); ++i) {
            if (step.args[i].mode != ParamMode::Read) continue;
            std::regex use("#" + step.args[i].param + R"(\b)");
            std::string replacement = term(step.args[i].term);
            body = std::regex_replace(body, use, std::regex_replace(replacement, std::regex(R"(\$)"), "$$$$"));
        }
        std::istringstream lines(body);
        for (std::string l; std::getline(lines, l);) {
            auto first = l.find_first_not_of(" \t");
            if (first == std::string::npos) continue;
            auto last = l.find_last_not_of(" \t\r");
            w_.line(l.substr(first, last - first + 1));
        }
    }

    void emit_step(std::size_t index) {
        if (index == rule_.steps.size()) {
            emit_tail();
            return;
        }
        const PlanStep& step = rule_.steps[index];
        if (const auto* g = std::get_if<GuardStep>(&step)) {
            w_.open("if (" + expr(g->comparison.lhs, g->domain) + " " + std::string(op_text(g->comparison.op)) + " " +
                    expr(g->comparison.rhs, g->domain) + ") {");
            emit_step(index + 1);
            w_.close();
            return;
        }
        if (const auto* probe = std::get_if<ProbeStep>(&step)) {
            w_.open("if (" + probe->predicate + "_" + probe->pattern + "(curr_buff" + call_args(probe->args, false) +
                    ") == 0) {");
            emit_step(index + 1);
            w_.close();
            return;
        }
        if (const auto* io = std::get_if<IoStep>(&step)) {
            w_.open("{");
            emit_io(*io);
            for (const auto& a : io->args) {
                if (a.mode != ParamMode::Set) continue;
                const std::string v = var(a.term.var_name());
                const std::string t = c_type(*a.var_type);
                w_.line(t + " " + v + " = (" + t + ")" + a.param + ";");
                if (!used_from(index + 1, a.term.var_name())) w_.line("(void)" + v + ";");
            }
            emit_step(index + 1);
            w_.close();
            return;
        }

        const auto& scan = std::get<ScanStep>(step);
        const std::string c = cursor(scan.predicate);
        w_.line("uint8_t *" + c + " = curr_buff;");
        w_.open("while ((" + c + " = " + scan.predicate + "_" + scan.pattern + "(" + c + call_args(scan.args, true) +
                ")) != 0) {");
        std::vector<std::string> checks;
        for (std::size_t i = 0; i < scan.args.size(); ++i) {
            const PlannedArg& a = scan.args[i];
            const std::string reader = scan.predicate + "_arg" + std::to_string(i + 1) + "(" + c + ")";
            if (a.action == ArgAction::Bind) {
                bool later_check = false;
                for (std::size_t j = i + 1; j < scan.args.size(); ++j)
                    later_check |= scan.args[j].action == ArgAction::Check && scan.args[j].term == a.term;
                if (later_check || used_from(index + 1, a.term.var_name()))
                    w_.line(c_type(a.type) + " " + var(a.term.var_name()) + " = " + reader + ";");
            } else if (a.action == ArgAction::Check) {
                checks.push_back(reader + " == " + var(a.term.var_name()));
            }
        }
        if (!checks.empty()) {
            std::string cond;
            for (const auto& ch : checks) cond += (cond.empty() ? "" : " && ") + ch;
            w_.open("if (" + cond + ") {");
            emit_step(index + 1);
            w_.close();
        } else {
            emit_step(index + 1);
        }
        w_.line(c + " += size_of_" + scan.predicate + ";");
        w_.close();
    }

    void emit_tail() {
        if (rule_.action) {
            w_.open("{");
            emit_io(*rule_.action);
            w_.close();
            return;
        }
        const HeadInsert& h = *rule_.insert;
        const std::string buff = rule_.kind == RuleKind::Deductive ? "curr_buff" : "next_buff";
        w_.open("if (" + h.predicate + "_" + h.pattern + "(" + buff + call_args(h.args, false) + ") == 0) {");
        w_.line("insert_" + h.predicate + "(" + buff + call_args(h.args, false) + ");");
        w_.line("inserted_facts = true;");
        w_.close();
    }

    const AnalyzedProgram& program_;
    const RulePlan& rule_;
    std::map<std::string, std::string> names_;
    std::set<std::string> cursors_;
    Writer w_;
};

std::string finder(const PredicateLayout& p, const std::string& pattern) {
    std::ostringstream o;
    std::string params = "uint8_t *pos";
    std::string cond = "pos[0] == " + number_const(p.name);
    for (std::size_t i = 0; i < p.arity(); ++i) {
        if (pattern[i] != 'b') continue;
        const std::string a = "a" + std::to_string(i + 1);
        params += ", " + c_type(p.arg_types[i]) + " " + a;
        cond += " && ded_read_" + type_suffix(p.arg_types[i]) + "(pos + " + std::to_string(p.arg_offset(i)) + ") == " + a;
    }
    o << "static inline uint8_t *" << p.name << "_" << pattern << "(" << params << ") {\n"
      << "  while (*pos != 0) {\n"
      << "    if (" << cond << ") return pos;\n"
      << "    pos += ded_fact_size[*pos];\n"
      << "  }\n"
      << "  return 0;\n"
      << "}\n";
    return o.str();
}

}  // namespace

std::string c_type(ValueType t) {
    switch (t) {
        case ValueType::Byte: return "uint8_t";
        case ValueType::Int: return "int16_t";
        case ValueType::ULong: return "uint32_t";
    }
    return "int16_t";
}

std::string emit_access_functions(const CompileLayout& layout) {
    std::ostringstream o;
    o << "// Buffer Declarations\n"
      << "#define DED_BUFFER_SIZE " << layout.buffer_size << "\n"
      << "// one zero byte after each buffer ends every scan\n"
      << "static uint8_t ded_memory[2 * (DED_BUFFER_SIZE + 1)];\n"
      << "static uint8_t *curr_buff = ded_memory;\n"
      << "static uint8_t *next_buff = ded_memory + DED_BUFFER_SIZE + 1;\n\n";

    o << "__attribute__((weak)) void ded_fault(uint8_t pred) {\n"
      << "  (void)pred;\n"
      << "  for (;;) {\n"
      << "  }\n"
      << "}\n\n";

    o << "// Functions for Buffer Access\n"
      << "static void switch_buffers(void) {\n"
      << "  uint8_t *old = curr_buff;\n"
      << "  curr_buff = next_buff;\n"
      << "  next_buff = old;\n"
      << "  memset(next_buff, 0, DED_BUFFER_SIZE);\n"
      << "}\n\n";

    if (layout.predicates.empty()) return o.str();

    for (const auto& p : layout.predicates) {
        o << "#define " << number_const(p.name) << " " << static_cast<int>(p.number) << "\n";
        o << "#define size_of_" << p.name << " " << p.fact_size << "\n";
    }
    o << "static const uint8_t ded_fact_size[" << layout.predicates.size() + 1 << "] = {1";
    for (const auto& p : layout.predicates) o << ", " << p.fact_size;
    o << "};\n\n";

    o << "static inline int16_t ded_i16(uint32_t v) {\n"
      << "  v &= 0xFFFFu;\n"
      << "  return (int16_t)((v & 0x8000u) ? (int32_t)v - 65536 : (int32_t)v);\n"
      << "}\n\n";

    o << "// Reading and Writing Facts\n"
      << "static inline void ded_write_byte(uint8_t *pos, uint8_t v) { pos[0] = v; }\n"
      << "static inline uint8_t ded_read_byte(const uint8_t *pos) { return pos[0]; }\n"
      << "static inline void ded_write_int(uint8_t *pos, int16_t v) {\n"
      << "  uint16_t m;\n"
      << "  if (v == INT16_MIN) {\n"
      << "    ded_fault(0);\n"
      << "    return;\n"
      << "  }\n"
      << "  m = (uint16_t)(v < 0 ? 0x8000u | (uint16_t)(-v) : (uint16_t)v);\n"
      << "  pos[0] = (uint8_t)(m >> 8);\n"
      << "  pos[1] = (uint8_t)m;\n"
      << "}\n"
      << "static inline int16_t ded_read_int(const uint8_t *pos) {\n"
      << "  int16_t m = (int16_t)(((uint16_t)(pos[0] & 0x7Fu) << 8) | pos[1]);\n"
      << "  return (pos[0] & 0x80u) ? (int16_t)-m : m;\n"
      << "}\n"
      << "static inline void ded_write_ulong(uint8_t *pos, uint32_t v) {\n"
      << "  pos[0] = (uint8_t)(v >> 24);\n"
      << "  pos[1] = (uint8_t)(v >> 16);\n"
      << "  pos[2] = (uint8_t)(v >> 8);\n"
      << "  pos[3] = (uint8_t)v;\n"
      << "}\n"
      << "static inline uint32_t ded_read_ulong(const uint8_t *pos) {\n"
      << "  return ((uint32_t)pos[0] << 24) | ((uint32_t)pos[1] << 16) | ((uint32_t)pos[2] << 8) | (uint32_t)pos[3];\n"
      << "}\n\n";

    for (const auto& p : layout.predicates) {
        o << "// " << p.name << "\n";
        auto patterns = layout.binding_patterns.find(p.name);
        if (patterns != layout.binding_patterns.end())
            for (const auto& pat : patterns->second) o << finder(p, pat);
        for (std::size_t i = 0; i < p.arity(); ++i) {
            o << "static inline " << c_type(p.arg_types[i]) << " " << p.name << "_arg" << i + 1
              << "(const uint8_t *pos) { return ded_read_" << type_suffix(p.arg_types[i]) << "(pos + "
              << p.arg_offset(i) << "); }\n";
        }
        std::string params = "uint8_t *buff";
        for (std::size_t i = 0; i < p.arity(); ++i)
            params += ", " + c_type(p.arg_types[i]) + " a" + std::to_string(i + 1);
        o << "static inline void insert_" << p.name << "(" << params << ") {\n"
          << "  uint8_t *pos = buff;\n"
          << "  while (*pos != 0) pos += ded_fact_size[*pos];\n"
          << "  if (pos + size_of_" << p.name << " > buff + DED_BUFFER_SIZE) {\n"
          << "    ded_fault(" << number_const(p.name) << ");\n"
          << "    return;\n"
          << "  }\n";
        for (std::size_t i = 0; i < p.arity(); ++i)
            o << "  ded_write_" << type_suffix(p.arg_types[i]) << "(pos + " << p.arg_offset(i) << ", a" << i + 1 << ");\n";
        o << "  pos[0] = " << number_const(p.name) << ";\n"
          << "}\n\n";
    }
    return o.str();
}

std::string emit_rule_function(const AnalyzedProgram& program, const RulePlan& rule, const std::string& function_name) {
    return RuleEmitter(program, rule).emit(function_name);
}

EmittedUnit emit_program(const AnalyzedProgram& program, const CodegenOptions& options) {
    EmittedUnit unit;
    unit.entry_points = {"setup", "loop"};
    unit.required_headers = {options.arduino_header ? "Arduino.h" : options.shim_header, "stdbool.h", "stdint.h",
                             "string.h"};

    std::ostringstream o;
    o << "// includes\n";
    for (const auto& h : unit.required_headers) o << "#include <" << h << ">\n";
    o << "\n" << emit_access_functions(program.layout);

    std::map<RuleKind, int> counters;
    std::vector<std::pair<const RulePlan*, std::string>> functions;
    for (const auto& r : program.rules) {
        std::string name = std::string(kind_name(r.kind)) + "_rule_" + std::to_string(++counters[r.kind]);
        functions.emplace_back(&r, name);
        o << emit_rule_function(program, r, name) << "\n";
    }

    o << "void setup(void) {\n"
      << "  // Buffer initialization\n"
      << "  memset(ded_memory, 0, sizeof ded_memory);\n"
      << "  curr_buff = ded_memory;\n"
      << "  next_buff = ded_memory + DED_BUFFER_SIZE + 1;\n"
      << "  // Facts for timestamp 0\n";
    std::vector<Fact> seen;
    for (const auto& f : program.program.facts) {
        bool dup = std::any_of(seen.begin(), seen.end(),
                               [&](const Fact& g) { return g.predicate == f.predicate && g.args == f.args; });
        if (dup) continue;
        seen.push_back(f);
        o << "  insert_" << f.predicate << "(curr_buff";
        for (auto v : f.args) o << ", " << integer_text(v);
        o << ");\n";
    }
    o << "}\n\n";

    o << "void loop(void) {\n";
    auto strata = program.deductive_strata();
    if (!strata.empty()) o << "  bool added_facts;\n";
    for (int s : strata) {
        o << "  do { // deductive phase, stratum " << s << "\n"
          << "    added_facts = false;\n";
        for (const auto& [r, name] : functions)
            if (r->kind == RuleKind::Deductive && r->stratum == s) o << "    added_facts |= " << name << "();\n";
        o << "  } while (added_facts);\n";
    }
    for (RuleKind k : {RuleKind::Output, RuleKind::Inductive, RuleKind::Input})
        for (const auto& [r, name] : functions)
            if (r->kind == k) o << "  " << name << "();\n";
    o << "  switch_buffers();\n"
      << "}\n";

    unit.source_text = o.str();
    return unit;
}

}  // namespace dedc
