#pragma once

// Exact symbolic expression kernel over jet coordinates.
//
// Expressions are kept in canonical form at all times: a sum of monomials,
// each monomial an exact rational coefficient times a sorted product of
// atomic powers.  Atoms are base coordinates x^mu, named parameters, jet
// coordinates phi^A_I / eta^A_I / rho^A_I, and elementary function
// applications (sin, cos, exp) whose argument is itself a canonical
// expression.  Structural equality of canonical forms decides semantic
// equality for this class (no trigonometric identities are applied).

#include <algorithm>
#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "varjet/error.hpp"

namespace varjet {

using Rational = boost::multiprecision::cpp_rational;

// Symmetric derivative multi-index, stored as its sorted representative.
struct MultiIndex {
    std::vector<int> entries;  // base-coordinate indices, ascending

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> e) : entries(std::move(e)) {
        std::sort(entries.begin(), entries.end());
    }

    int order() const { return static_cast<int>(entries.size()); }

    MultiIndex appended(int mu) const {
        MultiIndex r = *this;
        r.entries.insert(std::upper_bound(r.entries.begin(), r.entries.end(), mu), mu);
        return r;
    }

    auto operator<=>(const MultiIndex&) const = default;
};

// One jet coordinate: field id, variation tier (0 = phi, 1 = eta, 2 = rho),
// symmetric multi-index.
struct JetCoord {
    int field = 0;
    int tier = 0;
    MultiIndex index;

    JetCoord() = default;
    JetCoord(int f, int t, MultiIndex i) : field(f), tier(t), index(std::move(i)) {}
    JetCoord(int f, int t, std::vector<int> i) : field(f), tier(t), index(MultiIndex(std::move(i))) {}

    auto operator<=>(const JetCoord&) const = default;
};

enum class Func : std::uint8_t { Sin, Cos, Exp };

inline const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Exp: return "exp";
    }
    return "?";
}

class Expr;

struct BaseCoord {
    int mu = 0;
    auto operator<=>(const BaseCoord&) const = default;
};

struct Param {
    std::string name;
    auto operator<=>(const Param&) const = default;
};

// Elementary function applied to a canonical subexpression.  The argument is
// shared immutably.
struct FuncApp {
    Func fn;
    std::shared_ptr<const Expr> arg;
};

int compare(const FuncApp& a, const FuncApp& b);

using Atom = std::variant<Param, BaseCoord, JetCoord, FuncApp>;

int compare(const Atom& a, const Atom& b);

struct AtomLess {
    bool operator()(const Atom& a, const Atom& b) const { return compare(a, b) < 0; }
};

inline bool atom_eq(const Atom& a, const Atom& b) { return compare(a, b) == 0; }

// coefficient * product of atom^exponent, exponents nonzero, atoms strictly
// increasing.
struct Monomial {
    Rational coeff = 0;
    std::vector<std::pair<Atom, int>> powers;
};

int compare_powers(const Monomial& a, const Monomial& b);

class Expr {
  public:
    Expr() = default;  // zero

    static Expr constant(Rational r) {
        Expr e;
        if (r != 0) e.terms_.push_back({std::move(r), {}});
        return e;
    }
    static Expr integer(long long v) { return constant(Rational(v)); }
    static Expr atom(Atom a) {
        Expr e;
        e.terms_.push_back({Rational(1), {{std::move(a), 1}}});
        return e;
    }
    static Expr base_coord(int mu) { return atom(BaseCoord{mu}); }
    static Expr param(std::string name) { return atom(Param{std::move(name)}); }
    static Expr jet(int field, int tier, std::vector<int> idx) {
        return atom(JetCoord(field, tier, std::move(idx)));
    }
    static Expr jet(JetCoord c) { return atom(std::move(c)); }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_[0].powers.empty());
    }
    bool is_monomial() const { return terms_.size() <= 1; }
    Rational constant_value() const {
        if (terms_.empty()) return Rational(0);
        return terms_[0].coeff;
    }

    const std::vector<Monomial>& terms() const { return terms_; }

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);

    Expr& operator+=(const Expr& b) { return *this = *this + b; }
    Expr& operator-=(const Expr& b) { return *this = *this - b; }
    Expr& operator*=(const Expr& b) { return *this = *this * b; }

    friend bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

    static int compare(const Expr& a, const Expr& b);

    // Rebuilds the term list: sorts, merges like terms, drops zeros.  Already
    // canonical expressions come back structurally identical.
    static Expr from_terms(std::vector<Monomial> terms);

  private:
    std::vector<Monomial> terms_;
};

// ---------------------------------------------------------------------------

inline int compare(const FuncApp& a, const FuncApp& b) {
    if (a.fn != b.fn) return a.fn < b.fn ? -1 : 1;
    return Expr::compare(*a.arg, *b.arg);
}

inline int compare(const Atom& a, const Atom& b) {
    if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
    return std::visit(
        [&](const auto& x) -> int {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b);
            if constexpr (std::is_same_v<T, FuncApp>) {
                return compare(x, y);
            } else {
                if (x < y) return -1;
                if (y < x) return 1;
                return 0;
            }
        },
        a);
}

inline int compare_powers(const Monomial& a, const Monomial& b) {
    const size_t n = std::min(a.powers.size(), b.powers.size());
    for (size_t i = 0; i < n; ++i) {
        int c = compare(a.powers[i].first, b.powers[i].first);
        if (c != 0) return c;
        if (a.powers[i].second != b.powers[i].second)
            return a.powers[i].second < b.powers[i].second ? -1 : 1;
    }
    if (a.powers.size() != b.powers.size()) return a.powers.size() < b.powers.size() ? -1 : 1;
    return 0;
}

inline Expr Expr::from_terms(std::vector<Monomial> terms) {
    for (auto& m : terms) {
        std::sort(m.powers.begin(), m.powers.end(),
                  [](const auto& x, const auto& y) { return varjet::compare(x.first, y.first) < 0; });
        // merge repeated atoms
        std::vector<std::pair<Atom, int>> merged;
        for (auto& p : m.powers) {
            if (!merged.empty() && atom_eq(merged.back().first, p.first))
                merged.back().second += p.second;
            else
                merged.push_back(std::move(p));
        }
        std::erase_if(merged, [](const auto& p) { return p.second == 0; });
        m.powers = std::move(merged);
    }
    std::sort(terms.begin(), terms.end(),
              [](const Monomial& x, const Monomial& y) { return compare_powers(x, y) < 0; });
    std::vector<Monomial> out;
    for (auto& m : terms) {
        if (!out.empty() && compare_powers(out.back(), m) == 0)
            out.back().coeff += m.coeff;
        else
            out.push_back(std::move(m));
    }
    std::erase_if(out, [](const Monomial& m) { return m.coeff == 0; });
    Expr e;
    e.terms_ = std::move(out);
    return e;
}

inline Expr operator+(const Expr& a, const Expr& b) {
    std::vector<Monomial> t = a.terms_;
    t.insert(t.end(), b.terms_.begin(), b.terms_.end());
    return Expr::from_terms(std::move(t));
}

inline Expr operator-(const Expr& a) {
    Expr e = a;
    for (auto& m : e.terms_) m.coeff = -m.coeff;
    return e;
}

inline Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

inline Expr operator*(const Expr& a, const Expr& b) {
    std::vector<Monomial> t;
    t.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& ma : a.terms_) {
        for (const auto& mb : b.terms_) {
            Monomial m;
            m.coeff = ma.coeff * mb.coeff;
            m.powers = ma.powers;
            m.powers.insert(m.powers.end(), mb.powers.begin(), mb.powers.end());
            t.push_back(std::move(m));
        }
    }
    return Expr::from_terms(std::move(t));
}

inline int Expr::compare(const Expr& a, const Expr& b) {
    const size_t n = std::min(a.terms_.size(), b.terms_.size());
    for (size_t i = 0; i < n; ++i) {
        int c = compare_powers(a.terms_[i], b.terms_[i]);
        if (c != 0) return c;
        const Rational &x = a.terms_[i].coeff, &y = b.terms_[i].coeff;
        if (x != y) return x < y ? -1 : 1;
    }
    if (a.terms_.size() != b.terms_.size()) return a.terms_.size() < b.terms_.size() ? -1 : 1;
    return 0;
}

inline Expr operator*(const Rational& r, const Expr& e) { return Expr::constant(r) * e; }

// Integer powers.  Negative exponents require a single-monomial base; the
// reciprocal of zero raises DegenerateExpressionError.
inline Expr pow(const Expr& e, int k) {
    if (k == 0) return Expr::integer(1);
    if (k > 0) {
        Expr r = Expr::integer(1);
        Expr base = e;
        int n = k;
        while (n > 0) {
            if (n & 1) r = r * base;
            base = base * base;
            n >>= 1;
        }
        return r;
    }
    // k < 0
    if (e.is_zero()) throw DegenerateExpressionError("inverse of zero expression");
    if (e.terms().size() != 1)
        throw DegenerateExpressionError("inverse of a non-monomial expression is not supported");
    const Monomial& m = e.terms()[0];
    Monomial inv;
    inv.coeff = Rational(1) / m.coeff;
    for (const auto& p : m.powers) inv.powers.push_back({p.first, -p.second});
    Expr one_over;
    std::vector<Monomial> t{std::move(inv)};
    one_over = Expr::from_terms(std::move(t));
    return pow(one_over, -k);
}

inline Expr operator/(const Expr& a, const Expr& b) { return a * pow(b, -1); }

inline Expr apply_func(Func f, const Expr& arg) {
    if (arg.is_zero()) {
        switch (f) {
            case Func::Sin: return Expr::integer(0);
            case Func::Cos: return Expr::integer(1);
            case Func::Exp: return Expr::integer(1);
        }
    }
    return Expr::atom(FuncApp{f, std::make_shared<const Expr>(arg)});
}

inline Expr sin(const Expr& e) { return apply_func(Func::Sin, e); }
inline Expr cos(const Expr& e) { return apply_func(Func::Cos, e); }
inline Expr exp(const Expr& e) { return apply_func(Func::Exp, e); }

// Expressions are canonical by construction; this re-runs normalization so
// idempotence is checkable from outside.
inline Expr canonicalize(const Expr& e) { return Expr::from_terms(e.terms()); }

// Primitive form of a homogeneous equation left-hand side: divides out the
// rational content and any parameter power common to every term.  The overall
// sign flips only when every coefficient is negative, so mixed-sign
// expressions keep their leading sign.
inline Expr normalize_equation(const Expr& e) {
    if (e.is_zero()) return e;
    using boost::multiprecision::cpp_int;
    cpp_int num_gcd = 0, den_lcm = 1;
    bool all_negative = true;
    for (const Monomial& m : e.terms()) {
        num_gcd = gcd(num_gcd, numerator(m.coeff));
        den_lcm = lcm(den_lcm, denominator(m.coeff));
        if (m.coeff > 0) all_negative = false;
    }
    if (num_gcd < 0) num_gcd = -num_gcd;
    Rational content(num_gcd, den_lcm);
    if (all_negative) content = -content;

    std::vector<std::pair<Atom, int>> common;
    for (const auto& [a, k] : e.terms()[0].powers) {
        if (!std::holds_alternative<Param>(a) || k <= 0) continue;
        int low = k;
        for (const Monomial& m : e.terms()) {
            int found = 0;
            for (const auto& [b, kb] : m.powers)
                if (atom_eq(a, b)) found = kb;
            low = std::min(low, found);
            if (low <= 0) break;
        }
        if (low > 0) common.push_back({a, -low});
    }
    Monomial inv;
    inv.coeff = Rational(1) / content;
    inv.powers = std::move(common);
    std::vector<Monomial> t{std::move(inv)};
    return e * Expr::from_terms(std::move(t));
}

}  // namespace varjet
