#include "dedc/ast.hpp"

#include <algorithm>
#include <sstream>

namespace dedc {

std::string_view type_name(ValueType t) {
    switch (t) {
        case ValueType::Byte: return "byte";
        case ValueType::Int: return "int";
        case ValueType::ULong: return "unsigned long";
    }
    return "?";
}

std::optional<ValueType> parse_type_name(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string word, joined;
    while (in >> word) {
        if (!joined.empty()) joined += ' ';
        joined += word;
    }
    if (joined == "byte") return ValueType::Byte;
    if (joined == "int") return ValueType::Int;
    if (joined == "unsigned long") return ValueType::ULong;
    return std::nullopt;
}

std::int64_t min_value(ValueType t) {
    // int is stored sign-magnitude, so -32768 has no encoding.
    return t == ValueType::Int ? -32767 : 0;
}

std::int64_t max_value(ValueType t) {
    switch (t) {
        case ValueType::Byte: return 0xFF;
        case ValueType::Int: return 32767;
        case ValueType::ULong: return 0xFFFFFFFFLL;
    }
    return 0;
}

std::size_t fact_size(const std::vector<ValueType>& arg_types) {
    std::size_t n = 1;
    for (ValueType t : arg_types) n += value_width(t);
    return n;
}

std::size_t fact_size(const Declaration& d) { return fact_size(d.arg_types); }

std::string_view op_text(ArithOp op) {
    switch (op) {
        case ArithOp::Add: return "+";
        case ArithOp::Sub: return "-";
        case ArithOp::Mul: return "*";
    }
    return "?";
}

std::string_view op_text(CompareOp op) {
    switch (op) {
        case CompareOp::Less: return "<";
        case CompareOp::LessEq: return "<=";
        case CompareOp::Greater: return ">";
        case CompareOp::GreaterEq: return ">=";
        case CompareOp::Equal: return "==";
        case CompareOp::NotEqual: return "!=";
    }
    return "?";
}

std::string_view kind_name(RuleKind k) {
    switch (k) {
        case RuleKind::Unclassified: return "unclassified";
        case RuleKind::Deductive: return "deductive";
        case RuleKind::Inductive: return "inductive";
        case RuleKind::Output: return "output";
        case RuleKind::Input: return "input";
    }
    return "?";
}

bool Program::has_pending_macros() const {
    return std::any_of(rules.begin(), rules.end(), [](const Rule& r) { return !r.pending_macros.empty(); });
}

const Declaration* Program::find_declaration(std::string_view name) const {
    for (const auto& d : declarations)
        if (d.name == name) return &d;
    return nullptr;
}

std::string to_source(const Term& t) {
    if (t.is_variable()) return t.var_name();
    if (t.is_integer()) return std::to_string(t.integer_value());
    return "#" + t.constant_name();
}

namespace {

int precedence(ArithOp op) { return op == ArithOp::Mul ? 2 : 1; }

void print_expr(const Expr& e, std::string& out) {
    if (e.is_leaf()) {
        out += to_source(*e.leaf);
        return;
    }
    const Expr& lhs = e.children[0];
    const Expr& rhs = e.children[1];
    bool lhs_parens = !lhs.is_leaf() && precedence(lhs.op) < precedence(e.op);
    // Left associativity: a right operand of equal precedence keeps its grouping only with parentheses.
    bool rhs_parens = !rhs.is_leaf() && precedence(rhs.op) <= precedence(e.op);
    if (lhs_parens) out += '(';
    print_expr(lhs, out);
    if (lhs_parens) out += ')';
    out += ' ';
    out += op_text(e.op);
    out += ' ';
    if (rhs_parens) out += '(';
    print_expr(rhs, out);
    if (rhs_parens) out += ')';
}

std::string join_terms(const std::vector<Term>& terms) {
    std::string out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i) out += ", ";
        out += to_source(terms[i]);
    }
    return out;
}

}  // namespace

std::string to_source(const Expr& e) {
    std::string out;
    print_expr(e, out);
    return out;
}

std::string to_source(const Comparison& c) {
    std::string out = to_source(c.lhs);
    out += ' ';
    out += op_text(c.op);
    out += ' ';
    out += to_source(c.rhs);
    return out;
}

std::string to_source(const Literal& l) {
    std::string out;
    if (l.negated) out += '!';
    if (l.is_io) out += '#';
    out += l.predicate;
    if (!l.args.empty()) out += "(" + join_terms(l.args) + ")";
    return out;
}

std::string to_source(const Rule& r) {
    std::string out;
    for (const auto& m : r.pending_macros) {
        out += '[' + m.name;
        if (m.argument) out += ':' + *m.argument;
        out += ']';
    }
    out += to_source(r.head);
    if (r.head_next) out += "@next";
    if (!r.body.empty()) {
        out += " :- ";
        for (std::size_t i = 0; i < r.body.size(); ++i) {
            if (i) out += ", ";
            std::visit([&](const auto& item) { out += to_source(item); }, r.body[i]);
        }
    }
    out += '.';
    return out;
}

std::string to_source(const Fact& f) {
    std::string out = f.predicate;
    if (!f.args.empty()) {
        out += '(';
        for (std::size_t i = 0; i < f.args.size(); ++i) {
            if (i) out += ", ";
            out += std::to_string(f.args[i]);
        }
        out += ')';
    }
    out += "@0.";
    return out;
}

std::string to_source(const Declaration& d) {
    std::string out = ".decl " + d.name;
    if (!d.arg_types.empty()) {
        out += '(';
        for (std::size_t i = 0; i < d.arg_types.size(); ++i) {
            if (i) out += ", ";
            out += type_name(d.arg_types[i]);
        }
        out += ')';
    }
    return out;
}

std::string to_source(const IoDefinition& d) {
    std::string out = "#" + d.name + "(";
    for (std::size_t i = 0; i < d.params.size(); ++i) {
        if (i) out += ", ";
        out += d.params[i].name;
    }
    out += ") = {" + d.body + "}";
    return out;
}

std::string to_source(const Program& p) {
    std::string out;
    auto section = [&out](const auto& items) {
        if (items.empty()) return;
        if (!out.empty()) out += '\n';
        for (const auto& item : items) out += to_source(item) + '\n';
    };
    section(p.declarations);
    section(p.io_definitions);
    section(p.facts);
    section(p.rules);
    return out;
}

namespace {
void add_unique(std::vector<std::string>& out, const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
}
}  // namespace

void collect_variables(const Expr& e, std::vector<std::string>& out) {
    if (e.is_leaf()) {
        if (e.leaf->is_variable()) add_unique(out, e.leaf->var_name());
        return;
    }
    for (const auto& c : e.children) collect_variables(c, out);
}

void collect_variables(const Literal& l, std::vector<std::string>& out) {
    for (const auto& t : l.args)
        if (t.is_variable()) add_unique(out, t.var_name());
}

std::vector<std::string> rule_variables(const Rule& r) {
    std::vector<std::string> out;
    collect_variables(r.head, out);
    for (const auto& item : r.body) {
        if (const auto* lit = std::get_if<Literal>(&item)) {
            collect_variables(*lit, out);
        } else {
            const auto& cmp = std::get<Comparison>(item);
            collect_variables(cmp.lhs, out);
            collect_variables(cmp.rhs, out);
        }
    }
    return out;
}

}  // namespace dedc
