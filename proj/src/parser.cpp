#include "dedc/parser.hpp"

#include <cctype>
#include <limits>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dedc {

namespace {

enum class Tok {
    Ident,
    HashIdent,
    Integer,
    DeclKw,
    LParen,
    RParen,
    Comma,
    Dot,
    ColonDash,
    Colon,
    At,
    LBracket,
    RBracket,
    Bang,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
    Assign,
    Plus,
    Minus,
    Star,
    RawBlock,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;  // identifier name (without `#`), digits, or raw block body
    SourceLoc loc;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_variable_name(const std::string& s) {
    return !s.empty() && (std::isupper(static_cast<unsigned char>(s[0])) || s[0] == '_');
}

struct SyntaxError : std::runtime_error {
    SourceLoc loc;
    SyntaxError(SourceLoc l, const std::string& msg) : std::runtime_error(msg), loc(l) {}
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run(std::vector<Diagnostic>& diags) {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            SourceLoc loc{line_, col_};
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, "", loc});
                return out;
            }
            char c = src_[pos_];
            if (is_ident_start(c)) {
                out.push_back({Tok::Ident, ident(), loc});
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                std::string digits;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) digits += advance();
                out.push_back({Tok::Integer, digits, loc});
            } else if (c == '#') {
                advance();
                if (pos_ < src_.size() && is_ident_start(src_[pos_])) {
                    out.push_back({Tok::HashIdent, ident(), loc});
                } else {
                    diags.push_back(Diagnostic::error(loc, "expected a name after '#'"));
                }
            } else if (c == '.') {
                advance();
                if (src_.substr(pos_, 4) == "decl" && (pos_ + 4 >= src_.size() || !is_ident_char(src_[pos_ + 4]))) {
                    for (int i = 0; i < 4; ++i) advance();
                    out.push_back({Tok::DeclKw, ".decl", loc});
                } else {
                    out.push_back({Tok::Dot, ".", loc});
                }
            } else if (c == '{') {
                advance();
                std::string body;
                if (!raw_block(body)) {
                    diags.push_back(Diagnostic::error(loc, "unterminated '{' block"));
                    out.push_back({Tok::End, "", loc});
                    return out;
                }
                out.push_back({Tok::RawBlock, body, loc});
            } else {
                Tok kind;
                std::string text(1, c);
                advance();
                char n = pos_ < src_.size() ? src_[pos_] : '\0';
                switch (c) {
                    case '(': kind = Tok::LParen; break;
                    case ')': kind = Tok::RParen; break;
                    case ',': kind = Tok::Comma; break;
                    case '@': kind = Tok::At; break;
                    case '[': kind = Tok::LBracket; break;
                    case ']': kind = Tok::RBracket; break;
                    case '+': kind = Tok::Plus; break;
                    case '-': kind = Tok::Minus; break;
                    case '*': kind = Tok::Star; break;
                    case ':':
                        kind = n == '-' ? Tok::ColonDash : Tok::Colon;
                        break;
                    case '!':
                        kind = n == '=' ? Tok::Ne : Tok::Bang;
                        break;
                    case '<':
                        kind = n == '=' ? Tok::Le : Tok::Lt;
                        break;
                    case '>':
                        kind = n == '=' ? Tok::Ge : Tok::Gt;
                        break;
                    case '=':
                        kind = n == '=' ? Tok::EqEq : Tok::Assign;
                        break;
                    default:
                        diags.push_back(Diagnostic::error(loc, std::string("unexpected character '") + c + "'"));
                        continue;
                }
                if (kind == Tok::ColonDash || kind == Tok::Ne || kind == Tok::Le || kind == Tok::Ge ||
                    kind == Tok::EqEq) {
                    text += advance();
                }
                out.push_back({kind, text, loc});
            }
        }
    }

private:
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                return;
            }
        }
    }

    std::string ident() {
        std::string s;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) s += advance();
        return s;
    }

    // Captures C text up to the matching '}', honoring nested braces, string/char literals and comments.
    bool raw_block(std::string& body) {
        int depth = 1;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '"' || c == '\'') {
                char quote = advance();
                body += quote;
                while (pos_ < src_.size() && src_[pos_] != quote) {
                    if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) body += advance();
                    body += advance();
                }
                if (pos_ >= src_.size()) return false;
                body += advance();
                continue;
            }
            if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') body += advance();
                continue;
            }
            if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
                body += advance();
                body += advance();
                while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) body += advance();
                if (pos_ + 1 >= src_.size()) return false;
                body += advance();
                body += advance();
                continue;
            }
            if (c == '{') ++depth;
            if (c == '}' && --depth == 0) {
                advance();
                return true;
            }
            body += advance();
        }
        return false;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

std::string describe(const Token& t) {
    switch (t.kind) {
        case Tok::End: return "end of input";
        case Tok::Ident: return "'" + t.text + "'";
        case Tok::HashIdent: return "'#" + t.text + "'";
        case Tok::Integer: return "'" + t.text + "'";
        case Tok::RawBlock: return "'{' block";
        default: return "'" + t.text + "'";
    }
}

std::optional<CompareOp> compare_op(Tok k) {
    switch (k) {
        case Tok::Lt: return CompareOp::Less;
        case Tok::Le: return CompareOp::LessEq;
        case Tok::Gt: return CompareOp::Greater;
        case Tok::Ge: return CompareOp::GreaterEq;
        case Tok::EqEq: return CompareOp::Equal;
        case Tok::Ne: return CompareOp::NotEqual;
        default: return std::nullopt;
    }
}

bool is_operator(Tok k) {
    return compare_op(k).has_value() || k == Tok::Plus || k == Tok::Minus || k == Tok::Star || k == Tok::Assign;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags) : toks_(std::move(tokens)), diags_(diags) {}

    Program parse() {
        Program prog;
        std::set<std::string> io_names;
        while (peek().kind != Tok::End) {
            std::size_t start = pos_;
            try {
                statement(prog, io_names);
            } catch (const SyntaxError& e) {
                diags_.push_back(Diagnostic::error(e.loc, e.what()));
                recover(start);
            }
        }
        for (std::size_t i = 0; i < prog.rules.size(); ++i) prog.rules[i].source_index = i;
        return prog;
    }

    /// Parses exactly one IO definition and nothing else.
    IoDefinition single_io_definition() {
        if (peek().kind != Tok::HashIdent) throw SyntaxError(peek().loc, "expected an IO definition '#name(...) = {...}'");
        IoDefinition def = io_definition();
        if (peek().kind != Tok::End) throw SyntaxError(peek().loc, "unexpected " + describe(peek()) + " after IO definition");
        return def;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[i];
    }
    Token next() {
        Token t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        next();
        return true;
    }
    Token expect(Tok k, const char* what) {
        if (peek().kind != k) throw SyntaxError(peek().loc, std::string("expected ") + what + ", found " + describe(peek()));
        return next();
    }

    // Skip the rest of a broken statement: through the next '.', or up to the next declaration, or
    // just past an IO definition body.
    void recover(std::size_t start) {
        if (pos_ == start) next();
        while (peek().kind != Tok::End) {
            if (peek().kind == Tok::DeclKw) return;
            if (pos_ > start && toks_[pos_ - 1].kind == Tok::RawBlock) return;
            Tok k = next().kind;
            if (k == Tok::Dot) return;
        }
    }

    void statement(Program& prog, std::set<std::string>& io_names) {
        const Token& t = peek();
        if (t.kind == Tok::DeclKw) {
            prog.declarations.push_back(declaration());
            return;
        }
        if (t.kind == Tok::HashIdent && looks_like_io_definition()) {
            IoDefinition def = io_definition();
            if (!io_names.insert(def.name).second) {
                diags_.push_back(Diagnostic::error(def.loc, "duplicate definition of IO predicate #" + def.name));
                return;
            }
            prog.io_definitions.push_back(std::move(def));
            return;
        }
        if (t.kind == Tok::LBracket || t.kind == Tok::HashIdent || t.kind == Tok::Ident) {
            rule_or_fact(prog);
            return;
        }
        throw SyntaxError(t.loc, "expected a declaration, rule, fact or IO definition, found " + describe(t));
    }

    bool looks_like_io_definition() const {
        if (peek(1).kind != Tok::LParen) return peek(1).kind == Tok::Assign;
        std::size_t i = 2;
        while (peek(i).kind != Tok::RParen && peek(i).kind != Tok::End && peek(i).kind != Tok::Dot) ++i;
        return peek(i).kind == Tok::RParen && peek(i + 1).kind == Tok::Assign;
    }

    Declaration declaration() {
        Token kw = expect(Tok::DeclKw, "'.decl'");
        Token name = expect(Tok::Ident, "a predicate name");
        if (is_variable_name(name.text))
            throw SyntaxError(name.loc, "predicate names start with a lowercase letter: '" + name.text + "'");
        Declaration d{name.text, {}, kw.loc};
        if (accept(Tok::LParen)) {
            if (peek().kind != Tok::RParen) {
                do {
                    d.arg_types.push_back(value_type());
                } while (accept(Tok::Comma));
            }
            expect(Tok::RParen, "')'");
        }
        accept(Tok::Dot);
        return d;
    }

    ValueType value_type() {
        Token first = expect(Tok::Ident, "a type name");
        std::string text = first.text;
        if (text == "unsigned" && peek().kind == Tok::Ident) text += " " + next().text;
        auto t = parse_type_name(text);
        if (!t) throw SyntaxError(first.loc, "unsupported type '" + text + "' (expected byte, int or unsigned long)");
        return *t;
    }

    IoDefinition io_definition() {
        Token name = expect(Tok::HashIdent, "an IO predicate name");
        IoDefinition def;
        def.name = name.text;
        def.loc = name.loc;
        if (accept(Tok::LParen)) {
            if (peek().kind != Tok::RParen) {
                do {
                    Token p = expect(Tok::Ident, "a parameter name");
                    for (const auto& existing : def.params)
                        if (existing.name == p.text)
                            throw SyntaxError(p.loc, "duplicate parameter '" + p.text + "' in #" + def.name);
                    def.params.push_back({p.text, ParamMode::Read, std::nullopt});
                } while (accept(Tok::Comma));
            }
            expect(Tok::RParen, "')'");
        }
        expect(Tok::Assign, "'='");
        Token body = expect(Tok::RawBlock, "'{'");
        def.body = body.text;
        for (auto& d : classify_io_params(def)) diags_.push_back(std::move(d));
        return def;
    }

    void rule_or_fact(Program& prog) {
        SourceLoc start = peek().loc;
        std::vector<MacroUse> macros;
        while (peek().kind == Tok::LBracket) macros.push_back(macro());

        Literal head = literal(false);
        if (head.negated) throw SyntaxError(head.loc, "a rule head cannot be negated");

        bool head_next = false;
        std::optional<Token> timestamp;
        if (accept(Tok::At)) {
            if (peek().kind == Tok::Ident && peek().text == "next") {
                next();
                head_next = true;
            } else if (peek().kind == Tok::Integer) {
                timestamp = next();
            } else {
                throw SyntaxError(peek().loc, "expected 'next' or a timestamp after '@', found " + describe(peek()));
            }
        }

        std::vector<BodyItem> body;
        bool has_body = false;
        if (accept(Tok::ColonDash)) {
            has_body = true;
            do {
                body.push_back(body_item());
            } while (accept(Tok::Comma));
        }
        expect(Tok::Dot, "'.' at end of statement");

        if (timestamp) {
            if (timestamp->text != "0")
                throw SyntaxError(timestamp->loc, "facts allowed at timestamp 0 only");
            if (has_body) throw SyntaxError(timestamp->loc, "a fact with timestamp @0 cannot have a body");
            if (!macros.empty()) throw SyntaxError(macros.front().loc, "macros cannot prefix a fact");
            if (head.is_io) throw SyntaxError(head.loc, "IO predicates cannot appear in facts");
            Fact f{head.predicate, {}, start};
            for (const auto& a : head.args) {
                if (!a.is_integer())
                    throw SyntaxError(a.loc, "fact arguments must be integer constants");
                f.args.push_back(a.integer_value());
            }
            prog.facts.push_back(std::move(f));
            return;
        }
        if (!has_body && macros.empty()) {
            throw SyntaxError(start, head_next ? "an inductive rule needs a body"
                                               : "a fact needs the @0 timestamp (facts allowed at timestamp 0 only)");
        }
        Rule r;
        r.head = std::move(head);
        r.body = std::move(body);
        r.head_next = head_next;
        r.pending_macros = std::move(macros);
        r.loc = start;
        prog.rules.push_back(std::move(r));
    }

    MacroUse macro() {
        Token open = expect(Tok::LBracket, "'['");
        Token name = expect(Tok::Ident, "a macro name");
        MacroUse m{name.text, std::nullopt, open.loc};
        if (accept(Tok::Colon)) {
            std::string arg;
            if (accept(Tok::Minus)) arg = "-";
            if (peek().kind != Tok::Integer && peek().kind != Tok::Ident)
                throw SyntaxError(peek().loc, "expected a macro argument, found " + describe(peek()));
            arg += next().text;
            m.argument = arg;
        }
        expect(Tok::RBracket, "']'");
        return m;
    }

    Literal literal(bool allow_negation) {
        Literal lit;
        lit.loc = peek().loc;
        if (peek().kind == Tok::Bang) {
            if (!allow_negation) throw SyntaxError(peek().loc, "negation is not allowed here");
            next();
            lit.negated = true;
        }
        Token name = next();
        if (name.kind == Tok::HashIdent) {
            lit.is_io = true;
        } else if (name.kind != Tok::Ident) {
            throw SyntaxError(name.loc, "expected a predicate, found " + describe(name));
        } else if (is_variable_name(name.text)) {
            throw SyntaxError(name.loc, "predicate names start with a lowercase letter: '" + name.text + "'");
        }
        lit.predicate = name.text;
        if (accept(Tok::LParen)) {
            if (peek().kind != Tok::RParen) {
                do {
                    lit.args.push_back(term());
                } while (accept(Tok::Comma));
            }
            expect(Tok::RParen, "')'");
        }
        return lit;
    }

    std::int64_t integer_value(const Token& t, bool negative) {
        if (t.text.size() > 10 || std::stoull(t.text) > std::numeric_limits<std::uint32_t>::max())
            throw SyntaxError(t.loc, "integer constant " + t.text + " exceeds 32 bits");
        auto v = static_cast<std::int64_t>(std::stoull(t.text));
        return negative ? -v : v;
    }

    Term term() {
        Token t = peek();
        switch (t.kind) {
            case Tok::Ident:
                if (!is_variable_name(t.text))
                    throw SyntaxError(t.loc, "'" + t.text + "' is not a variable (variables start uppercase)");
                next();
                return Term::var(t.text, t.loc);
            case Tok::Integer:
                next();
                return Term::integer(integer_value(t, false), t.loc);
            case Tok::Minus: {
                next();
                Token digits = expect(Tok::Integer, "an integer after '-'");
                return Term::integer(integer_value(digits, true), t.loc);
            }
            case Tok::HashIdent:
                next();
                return Term::named(t.text, t.loc);
            default:
                throw SyntaxError(t.loc, "expected an argument, found " + describe(t));
        }
    }

    BodyItem body_item() {
        const Token& t = peek();
        bool literal_start = t.kind == Tok::Bang || (t.kind == Tok::Ident && !is_variable_name(t.text)) ||
                             (t.kind == Tok::HashIdent && !is_operator(peek(1).kind));
        if (literal_start) return literal(true);
        Comparison c;
        c.loc = t.loc;
        c.lhs = expr();
        auto op = compare_op(peek().kind);
        if (!op) {
            if (peek().kind == Tok::Assign) throw SyntaxError(peek().loc, "use '==' for equality");
            throw SyntaxError(peek().loc, "expected a comparison operator, found " + describe(peek()));
        }
        next();
        c.op = *op;
        c.rhs = expr();
        return c;
    }

    Expr expr() {
        Expr lhs = product();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            ArithOp op = next().kind == Tok::Plus ? ArithOp::Add : ArithOp::Sub;
            lhs = Expr::binary(op, std::move(lhs), product());
        }
        return lhs;
    }

    Expr product() {
        Expr lhs = unary();
        while (accept(Tok::Star)) lhs = Expr::binary(ArithOp::Mul, std::move(lhs), unary());
        return lhs;
    }

    Expr unary() {
        Token t = peek();
        if (t.kind == Tok::Minus) {
            next();
            if (peek().kind == Tok::Integer) return Expr::of(Term::integer(integer_value(next(), true), t.loc));
            return Expr::binary(ArithOp::Sub, Expr::of(Term::integer(0, t.loc)), unary());
        }
        if (t.kind == Tok::LParen) {
            next();
            Expr e = expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        return Expr::of(term());
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<Diagnostic>& diags_;
};

std::optional<ValueType> c_declared_type(std::string words) {
    std::istringstream in(words);
    std::string w, joined;
    while (in >> w) {
        if (w == "const" || w == "volatile" || w == "static" || w == "register") continue;
        if (!joined.empty()) joined += ' ';
        joined += w;
    }
    if (joined == "byte" || joined == "uint8_t" || joined == "unsigned char") return ValueType::Byte;
    if (joined == "int" || joined == "int16_t" || joined == "short" || joined == "short int" || joined == "signed int")
        return ValueType::Int;
    if (joined == "unsigned long" || joined == "uint32_t" || joined == "unsigned long int") return ValueType::ULong;
    return std::nullopt;
}

}  // namespace

std::vector<Diagnostic> classify_io_params(IoDefinition& def) {
    std::vector<Diagnostic> diags;
    static const std::regex declaration(R"(^\s*((?:[A-Za-z_]\w*\s+)+)([A-Za-z_]\w*)\s*=(?!=))");

    // Statements are delimited by ';' and braces; a set parameter is declared at statement start.
    std::vector<std::string> statements(1);
    for (char c : def.body) {
        if (c == ';' || c == '{' || c == '}') {
            statements.emplace_back();
        } else {
            statements.back() += c;
        }
    }

    for (auto& param : def.params) {
        bool read = false;
        const std::string needle = "#" + param.name;
        for (std::size_t at = def.body.find(needle); at != std::string::npos; at = def.body.find(needle, at + 1)) {
            std::size_t end = at + needle.size();
            if (end >= def.body.size() || !is_ident_char(def.body[end])) {
                read = true;
                break;
            }
        }
        bool set = false;
        std::optional<ValueType> type;
        for (const auto& stmt : statements) {
            std::smatch m;
            if (std::regex_search(stmt, m, declaration) && m[2] == param.name) {
                set = true;
                type = c_declared_type(m[1]);
                break;
            }
        }
        if (read && set) {
            diags.push_back(Diagnostic::error(
                def.loc, "parameter " + param.name + " of #" + def.name + " is both read and set in its definition"));
        } else if (!read && !set) {
            diags.push_back(Diagnostic::error(
                def.loc, "parameter " + param.name + " of #" + def.name + " is neither read nor set in its definition"));
        }
        param.mode = set ? ParamMode::Set : ParamMode::Read;
        param.declared_type = type;
    }
    return diags;
}

Checked<Program> parse_program(std::string_view source) {
    Checked<Program> result;
    auto tokens = Lexer(source).run(result.diagnostics);
    Parser parser(std::move(tokens), result.diagnostics);
    result.value = parser.parse();
    return result;
}

Checked<IoDefinition> parse_io_definition(std::string_view text) {
    Checked<IoDefinition> result;
    auto tokens = Lexer(text).run(result.diagnostics);
    Parser parser(std::move(tokens), result.diagnostics);
    try {
        result.value = parser.single_io_definition();
    } catch (const SyntaxError& e) {
        result.diagnostics.push_back(Diagnostic::error(e.loc, e.what()));
    }
    return result;
}

}  // namespace dedc
