#pragma once

// Textual rendering of canonical expressions.  Three styles:
//   plain  - the problem DSL's own expression syntax, reparseable
//   latex  - subscripted partials for documents
//   sexp   - parenthesized prefix interchange form, round-trips exactly
//
// The sexp grammar:
//   expr  := sum | mono
//   sum   := (+ mono mono ...)
//   mono  := (* coeff pow ...) | pow | coeff
//   pow   := (^ atom int) | atom
//   atom  := (jet field tier (idx ...)) | (x mu) | (param name)
//          | (sin expr) | (cos expr) | (exp expr)
//   coeff := integer | p/q

#include <cctype>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "varjet/error.hpp"
#include "varjet/expr.hpp"

namespace varjet {

enum class Style { Plain, Latex, Sexp };

// Field names for plain/latex output; tier-1/2 coordinates are rendered as
// eta_<field> / rho_<field>.  Falls back to f0, f1, ... when unnamed.
struct FormatContext {
    std::vector<std::string> field_names;

    std::string field(int id) const {
        if (id >= 0 && id < static_cast<int>(field_names.size())) return field_names[id];
        return "f" + std::to_string(id);
    }
};

namespace detail {

inline std::string rational_str(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << "/" << denominator(r);
    return os.str();
}

inline void write_plain(std::ostream& os, const Expr& e, const FormatContext& ctx);

inline std::string jet_name_plain(const JetCoord& j, const FormatContext& ctx) {
    std::string name = ctx.field(j.field);
    if (j.tier == 1) name = "eta_" + name;
    if (j.tier == 2) name = "rho_" + name;
    if (j.index.order() > 0) {
        name += "_";
        for (int mu : j.index.entries) name += std::to_string(mu);
    }
    return name;
}

inline void write_atom_plain(std::ostream& os, const Atom& a, const FormatContext& ctx) {
    if (const auto* p = std::get_if<Param>(&a)) {
        os << p->name;
    } else if (const auto* b = std::get_if<BaseCoord>(&a)) {
        os << "x" << b->mu;
    } else if (const auto* j = std::get_if<JetCoord>(&a)) {
        os << jet_name_plain(*j, ctx);
    } else {
        const auto& f = std::get<FuncApp>(a);
        os << func_name(f.fn) << "(";
        write_plain(os, *f.arg, ctx);
        os << ")";
    }
}

inline void write_monomial_plain(std::ostream& os, const Monomial& m, const FormatContext& ctx) {
    std::vector<std::pair<Atom, int>> num, den;
    for (const auto& p : m.powers) (p.second > 0 ? num : den).push_back(p);

    bool coeff_shown = m.coeff != 1 || num.empty();
    if (coeff_shown) os << rational_str(m.coeff);
    bool first = !coeff_shown;
    for (const auto& [a, k] : num) {
        if (!first) os << "*";
        first = false;
        write_atom_plain(os, a, ctx);
        if (k != 1) os << "^" << k;
    }
    for (const auto& [a, k] : den) {
        os << "/";
        write_atom_plain(os, a, ctx);
        if (k != -1) os << "^" << -k;
    }
}

inline void write_plain(std::ostream& os, const Expr& e, const FormatContext& ctx) {
    if (e.is_zero()) {
        os << "0";
        return;
    }
    bool first = true;
    for (const Monomial& m : e.terms()) {
        if (m.coeff < 0) {
            os << (first ? "-" : " - ");
            Monomial neg = m;
            neg.coeff = -neg.coeff;
            write_monomial_plain(os, neg, ctx);
        } else {
            if (!first) os << " + ";
            write_monomial_plain(os, m, ctx);
        }
        first = false;
    }
}

inline void write_latex(std::ostream& os, const Expr& e, const FormatContext& ctx);

inline void write_atom_latex(std::ostream& os, const Atom& a, const FormatContext& ctx) {
    if (const auto* p = std::get_if<Param>(&a)) {
        os << "\\" << p->name;
    } else if (const auto* b = std::get_if<BaseCoord>(&a)) {
        os << "x^{" << b->mu << "}";
    } else if (const auto* j = std::get_if<JetCoord>(&a)) {
        std::string base = ctx.field(j->field);
        if (j->tier == 1) base = "\\eta^{" + base + "}";
        else if (j->tier == 2) base = "\\rho^{" + base + "}";
        else base = "\\" + base;
        os << base;
        if (j->index.order() > 0) {
            os << "_{";
            for (int mu : j->index.entries) os << mu;
            os << "}";
        }
    } else {
        const auto& f = std::get<FuncApp>(a);
        os << "\\" << func_name(f.fn) << "\\left(";
        write_latex(os, *f.arg, ctx);
        os << "\\right)";
    }
}

inline void write_latex(std::ostream& os, const Expr& e, const FormatContext& ctx) {
    if (e.is_zero()) {
        os << "0";
        return;
    }
    bool first = true;
    for (const Monomial& m : e.terms()) {
        Rational c = m.coeff;
        if (c < 0) {
            os << (first ? "-" : " - ");
            c = -c;
        } else if (!first) {
            os << " + ";
        }
        first = false;
        if (denominator(c) != 1)
            os << "\\frac{" << numerator(c) << "}{" << denominator(c) << "}";
        else if (numerator(c) != 1 || m.powers.empty())
            os << numerator(c);
        bool leading = true;
        for (const auto& [a, k] : m.powers) {
            if (!leading) os << "\\,";
            leading = false;
            write_atom_latex(os, a, ctx);
            if (k != 1) os << "^{" << k << "}";
        }
    }
}

inline void write_sexp(std::ostream& os, const Expr& e);

inline void write_atom_sexp(std::ostream& os, const Atom& a) {
    if (const auto* p = std::get_if<Param>(&a)) {
        os << "(param " << p->name << ")";
    } else if (const auto* b = std::get_if<BaseCoord>(&a)) {
        os << "(x " << b->mu << ")";
    } else if (const auto* j = std::get_if<JetCoord>(&a)) {
        os << "(jet " << j->field << " " << j->tier << " (";
        bool first = true;
        for (int mu : j->index.entries) {
            if (!first) os << " ";
            first = false;
            os << mu;
        }
        os << "))";
    } else {
        const auto& f = std::get<FuncApp>(a);
        os << "(" << func_name(f.fn) << " ";
        write_sexp(os, *f.arg);
        os << ")";
    }
}

inline void write_pow_sexp(std::ostream& os, const Atom& a, int k) {
    if (k == 1) {
        write_atom_sexp(os, a);
    } else {
        os << "(^ ";
        write_atom_sexp(os, a);
        os << " " << k << ")";
    }
}

inline void write_monomial_sexp(std::ostream& os, const Monomial& m) {
    if (m.powers.empty()) {
        os << rational_str(m.coeff);
        return;
    }
    if (m.coeff == 1 && m.powers.size() == 1) {
        write_pow_sexp(os, m.powers[0].first, m.powers[0].second);
        return;
    }
    os << "(*";
    if (m.coeff != 1) os << " " << rational_str(m.coeff);
    for (const auto& [a, k] : m.powers) {
        os << " ";
        write_pow_sexp(os, a, k);
    }
    os << ")";
}

inline void write_sexp(std::ostream& os, const Expr& e) {
    if (e.is_zero()) {
        os << "0";
        return;
    }
    if (e.terms().size() == 1) {
        write_monomial_sexp(os, e.terms()[0]);
        return;
    }
    os << "(+";
    for (const Monomial& m : e.terms()) {
        os << " ";
        write_monomial_sexp(os, m);
    }
    os << ")";
}

}  // namespace detail

inline std::string format_expr(const Expr& e, Style style, const FormatContext& ctx = {}) {
    std::ostringstream os;
    switch (style) {
        case Style::Plain: detail::write_plain(os, e, ctx); break;
        case Style::Latex: detail::write_latex(os, e, ctx); break;
        case Style::Sexp: detail::write_sexp(os, e); break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// sexp reader

namespace detail {

class SexpReader {
  public:
    explicit SexpReader(std::string_view text) : text_(text) {}

    Expr parse() {
        Expr e = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input");
        return e;
    }

  private:
    std::string_view text_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(1, static_cast<int>(pos_) + 1, "sexp: " + msg);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        return text_[pos_];
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string symbol() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                       text_[pos_] == '_'))
            ++pos_;
        if (pos_ == start) fail("expected symbol");
        return std::string(text_.substr(start, pos_ - start));
    }

    long long integer() {
        skip_ws();
        size_t start = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start || (pos_ == start + 1 && !std::isdigit(static_cast<unsigned char>(text_[start]))))
            fail("expected integer");
        return std::stoll(std::string(text_.substr(start, pos_ - start)));
    }

    Rational rational() {
        long long num = integer();
        if (pos_ < text_.size() && text_[pos_] == '/') {
            ++pos_;
            long long den = integer();
            return Rational(num) / Rational(den);
        }
        return Rational(num);
    }

    bool at_number() {
        char c = peek();
        return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+';
    }

    Expr expr() {
        if (at_number()) return Expr::constant(rational());
        expect('(');
        char c = peek();
        std::string head;
        if (c == '+' || c == '*' || c == '^') {
            head = std::string(1, c);
            ++pos_;
        } else {
            head = symbol();
        }
        Expr result;
        if (head == "+") {
            while (peek() != ')') result += expr();
        } else if (head == "*") {
            result = Expr::integer(1);
            while (peek() != ')') result *= expr();
        } else if (head == "^") {
            Expr base = expr();
            long long k = integer();
            result = pow(base, static_cast<int>(k));
        } else if (head == "jet") {
            long long field = integer();
            long long tier = integer();
            expect('(');
            std::vector<int> idx;
            while (peek() != ')') idx.push_back(static_cast<int>(integer()));
            expect(')');
            result = Expr::jet(static_cast<int>(field), static_cast<int>(tier), std::move(idx));
        } else if (head == "x") {
            result = Expr::base_coord(static_cast<int>(integer()));
        } else if (head == "param") {
            result = Expr::param(symbol());
        } else if (head == "sin") {
            result = sin(expr());
        } else if (head == "cos") {
            result = cos(expr());
        } else if (head == "exp") {
            result = exp(expr());
        } else {
            fail("unknown head '" + head + "'");
        }
        expect(')');
        return result;
    }
};

}  // namespace detail

inline Expr parse_sexp(std::string_view text) { return detail::SexpReader(text).parse(); }

}  // namespace varjet
