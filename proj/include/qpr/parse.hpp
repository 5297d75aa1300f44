#pragma once

#include <cctype>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qpr/qp_system.hpp"

namespace qpr {

struct ParseError : Error {
    std::size_t line, col;
    ParseError(std::size_t l, std::size_t c, const std::string& msg)
        : Error("line " + std::to_string(l) + ", col " + std::to_string(c) + ": " + msg),
          line(l),
          col(c) {}
};

struct SyntaxError : ParseError {
    using ParseError::ParseError;
};

struct UnknownSymbolError : ParseError {
    std::string name;
    UnknownSymbolError(std::size_t l, std::size_t c, const std::string& sym)
        : ParseError(l, c, "unknown symbol \"" + sym + "\""), name(sym) {}
};

struct IrrationalExponentError : ParseError {
    IrrationalExponentError(std::size_t l, std::size_t c)
        : ParseError(l, c, "exponents must be rational literals") {}
};

/// One additive term of an equation's right-hand side.
struct AstTerm {
    Rational weight = 1;
    std::map<std::string, int> param_pows;
    std::map<std::string, Rational> var_pows;
    std::size_t line = 0, col = 0;
};

struct OdeAst {
    std::vector<std::string> variables;   // declaration order = equation order
    std::vector<std::string> parameters;  // declared with `params:`
    std::vector<std::vector<AstTerm>> equations;
};

namespace detail {

struct Token {
    enum Kind { Ident, Number, Prime, Eq, Plus, Minus, Star, Caret, Slash,
                LParen, RParen, Comma, Colon, Semi, End } kind;
    std::string text;
    std::size_t line, col;
};

class Lexer {
public:
    Lexer(std::string_view src, std::size_t line) : src_(src), line_(line) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::size_t col = pos_ + 1;
        if (pos_ >= src_.size()) return {Token::End, "", line_, col};
        const char ch = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            return {Token::Ident, std::string(src_.substr(start, pos_ - start)), line_, col};
        }
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            if (pos_ < src_.size() && src_[pos_] == '.') {
                ++pos_;
                if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    throw SyntaxError(line_, pos_ + 1, "digit expected after decimal point");
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            }
            return {Token::Number, std::string(src_.substr(start, pos_ - start)), line_, col};
        }
        ++pos_;
        switch (ch) {
            case '\'': return {Token::Prime, "'", line_, col};
            case '=': return {Token::Eq, "=", line_, col};
            case '+': return {Token::Plus, "+", line_, col};
            case '-': return {Token::Minus, "-", line_, col};
            case '*': return {Token::Star, "*", line_, col};
            case '^': return {Token::Caret, "^", line_, col};
            case '/': return {Token::Slash, "/", line_, col};
            case '(': return {Token::LParen, "(", line_, col};
            case ')': return {Token::RParen, ")", line_, col};
            case ',': return {Token::Comma, ",", line_, col};
            case ':': return {Token::Colon, ":", line_, col};
            case ';': return {Token::Semi, ";", line_, col};
            default:
                throw SyntaxError(line_, col, std::string("unexpected character '") + ch + "'");
        }
    }

private:
    std::string_view src_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

// Raw per-line parse state: identifiers not yet split into vars/params.
struct RawTerm {
    Rational weight = 1;
    std::map<std::string, Rational> ident_pows;
    std::size_t line = 0, col = 0;
};

class LineParser {
public:
    LineParser(std::string_view src, std::size_t line) : lex_(src, line) { advance(); }

    bool at_end() const { return tok_.kind == Token::End; }
    const Token& peek() const { return tok_; }

    Token expect(Token::Kind kind, const std::string& what) {
        if (tok_.kind != kind)
            throw SyntaxError(tok_.line, tok_.col, "expected " + what);
        Token t = tok_;
        advance();
        return t;
    }

    bool accept(Token::Kind kind) {
        if (tok_.kind != kind) return false;
        advance();
        return true;
    }

    // sum := ['+'|'-'] term (('+'|'-') term)*
    std::vector<RawTerm> parse_sum() {
        std::vector<RawTerm> terms;
        bool negative = false;
        if (accept(Token::Minus))
            negative = true;
        else
            accept(Token::Plus);
        for (;;) {
            RawTerm t = parse_term();
            if (negative) t.weight = -t.weight;
            if (t.weight != 0) terms.push_back(std::move(t));
            if (accept(Token::Plus)) {
                negative = false;
            } else if (accept(Token::Minus)) {
                negative = true;
            } else {
                break;
            }
        }
        expect(Token::End, "end of line");
        return terms;
    }

private:
    void advance() { tok_ = lex_.next(); }

    // number := INT ['/' INT] | DECIMAL (exact)
    Rational parse_number() {
        Token t = expect(Token::Number, "a number");
        if (t.text.find('.') != std::string::npos) return parse_rational(t.text);
        if (accept(Token::Slash)) {
            Token d = expect(Token::Number, "a denominator");
            if (d.text.find('.') != std::string::npos)
                throw SyntaxError(d.line, d.col, "denominator must be an integer");
            return parse_rational(t.text + "/" + d.text);
        }
        return parse_rational(t.text);
    }

    // exponent := ['-'] INT | '(' ['-'] INT ['/' INT] | DECIMAL ')'
    Rational parse_exponent() {
        if (accept(Token::LParen)) {
            bool neg = accept(Token::Minus);
            Rational r = parse_number();
            expect(Token::RParen, "')'");
            return neg ? Rational(-r) : r;
        }
        bool neg = accept(Token::Minus);
        if (tok_.kind == Token::Ident) throw IrrationalExponentError(tok_.line, tok_.col);
        Token t = expect(Token::Number, "an exponent");
        if (t.text.find('.') != std::string::npos)
            throw SyntaxError(t.line, t.col,
                              "fractional exponents must be parenthesized, e.g. ^(1/2)");
        Rational r = parse_rational(t.text);
        return neg ? Rational(-r) : r;
    }

    // term := factor ('*' factor)* ; factor := number | ident ['^' exponent]
    RawTerm parse_term() {
        RawTerm out;
        out.line = tok_.line;
        out.col = tok_.col;
        for (;;) {
            if (tok_.kind == Token::Number) {
                out.weight *= parse_number();
            } else if (tok_.kind == Token::Ident) {
                Token id = tok_;
                advance();
                Rational pow = 1;
                if (accept(Token::Caret)) pow = parse_exponent();
                auto& slot = out.ident_pows[id.text];
                slot += pow;
                if (slot == 0) out.ident_pows.erase(id.text);
            } else {
                throw SyntaxError(tok_.line, tok_.col, "expected a factor");
            }
            if (!accept(Token::Star)) break;
        }
        return out;
    }

    Lexer lex_;
    Token tok_{Token::End, "", 0, 0};
};

}  // namespace detail

/// Parses the line-oriented .qp language (see docs/format.md) into an AST.
inline OdeAst parse(std::string_view text) {
    OdeAst ast;
    std::set<std::string> params, vars;
    struct RawEq {
        std::string var;
        std::vector<detail::RawTerm> terms;
        std::size_t line, col;
    };
    std::vector<RawEq> raw;

    std::size_t line_no = 0, pos = 0;
    while (pos <= text.size()) {
        ++line_no;
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);

        detail::LineParser p(line, line_no);
        if (p.at_end()) {
            if (eol == text.size()) break;
            continue;
        }
        if (p.peek().kind == detail::Token::Ident && p.peek().text == "params") {
            p.expect(detail::Token::Ident, "params");
            p.expect(detail::Token::Colon, "':'");
            for (;;) {
                auto name = p.expect(detail::Token::Ident, "a parameter name");
                if (!params.insert(name.text).second)
                    throw SyntaxError(name.line, name.col,
                                      "parameter \"" + name.text + "\" declared twice");
                ast.parameters.push_back(name.text);
                if (!p.accept(detail::Token::Comma)) break;
            }
            p.accept(detail::Token::Semi);
            if (!p.at_end())
                throw SyntaxError(p.peek().line, p.peek().col, "expected end of line");
        } else {
            auto name = p.expect(detail::Token::Ident, "a variable name");
            p.expect(detail::Token::Prime, "\"'\" after the variable name");
            p.expect(detail::Token::Eq, "'='");
            if (!vars.insert(name.text).second)
                throw SyntaxError(name.line, name.col,
                                  "duplicate equation for \"" + name.text + "\"");
            raw.push_back({name.text, p.parse_sum(), name.line, name.col});
        }
        if (eol == text.size()) break;
    }

    for (const auto& eq : raw) {
        if (params.count(eq.var))
            throw SyntaxError(eq.line, eq.col, "\"" + eq.var + "\" is declared as a parameter");
        ast.variables.push_back(eq.var);
    }

    // split identifiers into parameters and variables
    for (const auto& eq : raw) {
        std::vector<AstTerm> terms;
        for (const auto& rt : eq.terms) {
            AstTerm t;
            t.weight = rt.weight;
            t.line = rt.line;
            t.col = rt.col;
            for (const auto& [name, pow] : rt.ident_pows) {
                if (params.count(name)) {
                    if (!is_integer(pow))
                        throw SyntaxError(rt.line, rt.col,
                                          "parameter \"" + name + "\" must have an integer power");
                    t.param_pows[name] = static_cast<int>(num(pow).convert_to<long>());
                } else if (vars.count(name)) {
                    t.var_pows[name] = pow;
                } else {
                    throw UnknownSymbolError(rt.line, rt.col, name);
                }
            }
            terms.push_back(std::move(t));
        }
        ast.equations.push_back(std::move(terms));
    }
    return ast;
}

/// Lowers an AST into a structurally normalized QPSystem without the
/// maximal-rank gate (reduced systems legitimately fail it).
inline QPSystem lower_raw(const OdeAst& ast) {
    QPSystem sys;
    sys.n = ast.variables.size();
    sys.var_names = ast.variables;
    sys.lambda.assign(sys.n, Coefficient());
    std::map<std::string, std::size_t> var_index;
    for (std::size_t i = 0; i < sys.n; ++i) var_index[ast.variables[i]] = i;

    // exponent row of term/x_i -> A column
    std::map<std::vector<Rational>, std::vector<Coefficient>> columns;
    for (std::size_t i = 0; i < sys.n; ++i) {
        for (const AstTerm& t : ast.equations[i]) {
            std::vector<Rational> row(sys.n, Rational(0));
            for (const auto& [name, pow] : t.var_pows) row[var_index[name]] = pow;
            row[i] -= 1;
            Coefficient coeff = Coefficient::term(t.weight, ParamAtom(t.param_pows.begin(),
                                                                      t.param_pows.end()));
            bool constant_row = true;
            for (const Rational& r : row)
                if (r != 0) {
                    constant_row = false;
                    break;
                }
            if (constant_row) {
                sys.lambda[i] += coeff;
            } else {
                auto [it, inserted] = columns.try_emplace(std::move(row),
                                                          std::vector<Coefficient>(sys.n));
                it->second[i] += coeff;
            }
        }
    }
    sys.m = columns.size();
    sys.B = RatMatrix(sys.m, sys.n);
    sys.A.assign(sys.n, std::vector<Coefficient>(sys.m));
    std::size_t j = 0;
    for (const auto& [row, col] : columns) {
        sys.B.set_row(j, row);
        for (std::size_t i = 0; i < sys.n; ++i) sys.A[i][j] = col[i];
        ++j;
    }
    return structural_normalize(std::move(sys));
}

/// Lowers and standardizes: the maximal-rank/empty-system gate applies.
inline QPSystem lower(const OdeAst& ast) { return normalize(lower_raw(ast)); }

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace detail {

inline std::string render_exponent(const Rational& e) {
    if (is_integer(e)) return "^" + qpr::to_string(e);
    std::string s = qpr::to_string(e);
    if (!s.empty() && s[0] == '-') return "^(-" + s.substr(1) + ")";
    return "^(" + s + ")";
}

// One text term per coefficient atom: weight * params * variable powers.
inline void render_terms(std::string& out, const Coefficient& coeff,
                         const std::vector<std::string>& names,
                         const std::vector<Rational>& exponents) {
    for (const auto& [atom, weight] : coeff.terms()) {
        Rational mag = weight < 0 ? Rational(-weight) : weight;
        if (out.empty()) {
            if (weight < 0) out += '-';
        } else {
            out += weight < 0 ? " - " : " + ";
        }
        std::vector<std::string> factors;
        for (const auto& [pname, pow] : atom)
            factors.push_back(pow == 1 ? pname : pname + "^" + std::to_string(pow));
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (exponents[k] == 0) continue;
            factors.push_back(exponents[k] == 1 ? names[k]
                                                : names[k] + render_exponent(exponents[k]));
        }
        std::string body;
        if (factors.empty()) {
            body = qpr::to_string(mag);
        } else {
            if (mag != 1) body = qpr::to_string(mag) + "*";
            for (std::size_t k = 0; k < factors.size(); ++k) {
                if (k) body += '*';
                body += factors[k];
            }
        }
        out += body;
    }
}

}  // namespace detail

/// Canonical text form; lower_raw(parse(render(sys))) == sys exactly.
inline std::string render(const QPSystem& sys) {
    std::string out = "# quasipolynomial system: n=" + std::to_string(sys.n) +
                      " m=" + std::to_string(sys.m) + "\n";
    const std::vector<std::string> params = sys.parameters();
    if (!params.empty()) {
        out += "params: ";
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (i) out += ", ";
            out += params[i];
        }
        out += ";\n";
    }
    for (std::size_t i = 0; i < sys.n; ++i) {
        std::string rhs;
        if (!sys.lambda[i].is_zero()) {
            std::vector<Rational> self(sys.n, Rational(0));
            self[i] = 1;
            detail::render_terms(rhs, sys.lambda[i], sys.var_names, self);
        }
        for (std::size_t j = 0; j < sys.m; ++j) {
            if (sys.A[i][j].is_zero()) continue;
            std::vector<Rational> expo = sys.B.row(j);
            expo[i] += 1;
            detail::render_terms(rhs, sys.A[i][j], sys.var_names, expo);
        }
        out += sys.var_names[i] + "' = " + (rhs.empty() ? "0" : rhs) + "\n";
    }
    return out;
}

inline QPSystem parse_system(std::string_view text) { return lower(parse(text)); }
inline QPSystem parse_system_raw(std::string_view text) { return lower_raw(parse(text)); }

}  // namespace qpr
