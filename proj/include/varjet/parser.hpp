#pragma once

// Problem-definition language.
//
// Statements, each terminated by ';':
//   dim <int>
//   field <name>            or  field <name>[count]
//   param <name>            or  param <name> = <rational>
//   L = <expr>
//
// Expressions: + - * / ^, parentheses, sin/cos/exp, integer and p/q
// literals, derivative suffixes (phi_01), d(<field expr>, i, j?), and the
// sum macro sum(idx, lo, hi, body) expanded at parse time.  eta_<field> and
// rho_<field> address the variation tiers and cannot be declared.

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "varjet/calculus.hpp"
#include "varjet/error.hpp"
#include "varjet/expr.hpp"
#include "varjet/problem.hpp"

namespace varjet {

namespace detail {

struct Token {
    enum Kind { Ident, Number, Punct, End } kind;
    std::string text;
    int line;
    int column;
};

inline std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto advance = [&](size_t k) {
        for (size_t j = 0; j < k; ++j) {
            if (src[i + j] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        i += k;
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        int tl = line, tc = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            out.push_back({Token::Ident, std::string(src.substr(i, j - i)), tl, tc});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && src[j] == '.')
                throw ParseError(tl, tc, "floating-point literals are not allowed; use p/q");
            out.push_back({Token::Number, std::string(src.substr(i, j - i)), tl, tc});
            advance(j - i);
            continue;
        }
        if (std::string("+-*/^()[],;=").find(c) != std::string::npos) {
            out.push_back({Token::Punct, std::string(1, c), tl, tc});
            advance(1);
            continue;
        }
        throw ParseError(tl, tc, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Token::End, "", line, col});
    return out;
}

class ProblemParser {
  public:
    explicit ProblemParser(std::string_view src) : tokens_(tokenize(src)) {}

    Problem parse(std::string name) {
        Problem p;
        p.name = std::move(name);
        bool have_l = false;
        while (!at_end()) {
            const Token& t = peek();
            if (t.kind != Token::Ident) fail("expected statement keyword");
            if (t.text == "dim") {
                next();
                p.n = static_cast<int>(integer_literal());
                if (p.n < 1) fail("dimension must be positive");
            } else if (t.text == "field") {
                next();
                std::string fname = ident();
                if (fname.rfind("eta_", 0) == 0 || fname.rfind("rho_", 0) == 0)
                    fail("'" + fname + "' is reserved for variation tiers");
                if (accept("[")) {
                    long long count = integer_literal();
                    expect("]");
                    if (count < 1) fail("field count must be positive");
                    for (long long k = 0; k < count; ++k)
                        declare_field(fname + std::to_string(k));
                } else {
                    declare_field(fname);
                }
            } else if (t.text == "param") {
                next();
                std::string pname = ident();
                if (fields_.count(pname) || params_.count(pname))
                    fail("duplicate name '" + pname + "'");
                std::optional<Rational> value;
                if (accept("=")) value = rational_literal();
                params_.emplace(pname, value);
            } else if (t.text == "L") {
                next();
                expect("=");
                p.field_names = field_names_;
                p.lagrangian = expr(p);
                have_l = true;
            } else {
                fail("unknown statement '" + t.text + "'");
            }
            expect(";");
        }
        if (!have_l) fail("missing Lagrangian (L = ...)");
        p.field_names = field_names_;
        p.parameters = params_;
        p.validate();
        return p;
    }

  private:
    std::vector<Token> tokens_;
    size_t pos_ = 0;
    std::vector<std::string> field_names_;
    std::map<std::string, int> fields_;
    std::map<std::string, std::optional<Rational>> params_;
    std::map<std::string, long long> env_;  // sum-macro index bindings

    const Token& peek() const { return tokens_[pos_]; }
    const Token& next() { return tokens_[pos_++]; }
    bool at_end() const { return peek().kind == Token::End; }

    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        throw ParseError(t.line, t.column, msg);
    }

    bool accept(const std::string& p) {
        if (peek().kind == Token::Punct && peek().text == p) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(const std::string& p) {
        if (!accept(p)) fail("expected '" + p + "'");
    }

    std::string ident() {
        if (peek().kind != Token::Ident) fail("expected identifier");
        return next().text;
    }

    void declare_field(const std::string& fname) {
        if (fields_.count(fname) || params_.count(fname)) fail("duplicate name '" + fname + "'");
        fields_[fname] = static_cast<int>(field_names_.size());
        field_names_.push_back(fname);
    }

    long long integer_literal() {
        bool neg = accept("-");
        if (peek().kind != Token::Number) fail("expected integer");
        long long v = std::stoll(next().text);
        return neg ? -v : v;
    }

    Rational rational_literal() {
        long long num = integer_literal();
        if (accept("/")) {
            long long den = integer_literal();
            if (den == 0) fail("zero denominator");
            return Rational(num) / Rational(den);
        }
        return Rational(num);
    }

    // expression grammar -------------------------------------------------

    Expr expr(const Problem& p) {
        Expr r = term(p);
        for (;;) {
            if (accept("+"))
                r += term(p);
            else if (accept("-"))
                r -= term(p);
            else
                return r;
        }
    }

    Expr term(const Problem& p) {
        Expr r = unary(p);
        for (;;) {
            if (accept("*")) {
                r *= unary(p);
            } else if (accept("/")) {
                Expr d = unary(p);
                if (d.is_zero()) fail("division by zero");
                if (d.terms().size() != 1) fail("division by a sum is not supported");
                r = r / d;
            } else {
                return r;
            }
        }
    }

    Expr unary(const Problem& p) {
        if (accept("-")) return -unary(p);
        if (accept("+")) return unary(p);
        return power(p);
    }

    Expr power(const Problem& p) {
        Expr base = primary(p);
        if (accept("^")) {
            long long k = integer_literal();
            if (base.is_zero() && k < 0) fail("zero raised to a negative power");
            if (k < 0 && base.terms().size() != 1) fail("negative power of a sum is not supported");
            return pow(base, static_cast<int>(k));
        }
        return base;
    }

    Expr primary(const Problem& p) {
        if (accept("(")) {
            Expr r = expr(p);
            expect(")");
            return r;
        }
        if (peek().kind == Token::Number) {
            return Expr::constant(Rational(std::stoll(next().text)));
        }
        if (peek().kind != Token::Ident) fail("expected expression");
        std::string name = peek().text;
        if (name == "sin" || name == "cos" || name == "exp") {
            next();
            expect("(");
            Expr arg = expr(p);
            expect(")");
            if (name == "sin") return sin(arg);
            if (name == "cos") return cos(arg);
            return exp(arg);
        }
        if (name == "d") {
            next();
            expect("(");
            Expr target = expr(p);
            expect(",");
            long long i = index_value();
            check_base_index(i, p);
            Expr r = total_derivative(target, static_cast<int>(i));
            if (accept(",")) {
                long long j = index_value();
                check_base_index(j, p);
                r = total_derivative(r, static_cast<int>(j));
            }
            expect(")");
            return r;
        }
        if (name == "sum") {
            next();
            expect("(");
            std::string idx = ident();
            if (env_.count(idx)) fail("sum index '" + idx + "' shadows an outer index");
            expect(",");
            long long lo = index_value();
            expect(",");
            long long hi = index_value();
            expect(",");
            size_t body = pos_;
            Expr total;
            size_t after = body;
            for (long long v = lo; v <= hi; ++v) {
                pos_ = body;
                env_[idx] = v;
                total += expr(p);
                after = pos_;
            }
            env_.erase(idx);
            pos_ = after;
            if (lo > hi) skip_balanced_until_rparen();
            expect(")");
            return total;
        }
        return atom(p);
    }

    // Skips the unread body of an empty sum so the closing ')' lines up.
    void skip_balanced_until_rparen() {
        int depth = 0;
        while (!at_end()) {
            const Token& t = peek();
            if (t.kind == Token::Punct && (t.text == "(" || t.text == "[")) ++depth;
            if (t.kind == Token::Punct && (t.text == ")" || t.text == "]")) {
                if (t.text == ")" && depth == 0) return;
                --depth;
            }
            ++pos_;
        }
        fail("unterminated sum");
    }

    long long index_value() {
        if (peek().kind == Token::Ident) {
            auto it = env_.find(peek().text);
            if (it == env_.end()) fail("unknown index '" + peek().text + "'");
            next();
            return it->second;
        }
        return integer_literal();
    }

    void check_base_index(long long i, const Problem& p) const {
        if (i < 0 || i >= p.n)
            throw ParseError(peek().line, peek().column,
                             "base index " + std::to_string(i) + " out of range for dim " +
                                 std::to_string(p.n));
    }

    Expr atom(const Problem& p) {
        const Token& t = peek();
        std::string name = next().text;
        if (accept("[")) {
            long long sel = index_value();
            expect("]");
            name += std::to_string(sel);
        }
        int tier = 0;
        std::string stem = name;
        if (stem.rfind("eta_", 0) == 0) {
            tier = 1;
            stem = stem.substr(4);
        } else if (stem.rfind("rho_", 0) == 0) {
            tier = 2;
            stem = stem.substr(4);
        }

        // exact matches first, so declared names win over suffix splitting
        if (tier == 0) {
            auto pit = params_.find(stem);
            if (pit != params_.end()) return Expr::param(stem);
        }
        auto fit = fields_.find(stem);
        if (fit != fields_.end()) return Expr::jet(fit->second, tier, {});

        // derivative suffix: trailing _<digits>
        size_t us = stem.rfind('_');
        if (us != std::string::npos && us + 1 < stem.size()) {
            std::string tail = stem.substr(us + 1);
            bool digits = true;
            for (char c : tail)
                if (!std::isdigit(static_cast<unsigned char>(c))) digits = false;
            if (digits) {
                std::string base = stem.substr(0, us);
                auto bit = fields_.find(base);
                if (bit != fields_.end()) {
                    std::vector<int> idx;
                    for (char c : tail) {
                        int mu = c - '0';
                        if (mu >= p.n)
                            throw ParseError(t.line, t.column,
                                             "base index " + std::to_string(mu) +
                                                 " out of range for dim " + std::to_string(p.n));
                        idx.push_back(mu);
                    }
                    return Expr::jet(bit->second, tier, std::move(idx));
                }
            }
        }

        // base coordinates x0, x1, ...
        if (tier == 0 && stem.size() > 1 && stem[0] == 'x') {
            bool digits = true;
            for (size_t k = 1; k < stem.size(); ++k)
                if (!std::isdigit(static_cast<unsigned char>(stem[k]))) digits = false;
            if (digits) {
                int mu = std::stoi(stem.substr(1));
                if (mu >= p.n)
                    throw ParseError(t.line, t.column, "base coordinate x" + std::to_string(mu) +
                                                           " out of range for dim " +
                                                           std::to_string(p.n));
                return Expr::base_coord(mu);
            }
        }
        throw ParseError(t.line, t.column, "unknown identifier '" + name + "'");
    }
};

}  // namespace detail

inline Problem parse_problem(std::string_view text, std::string name = "problem") {
    return detail::ProblemParser(text).parse(std::move(name));
}

}  // namespace varjet
