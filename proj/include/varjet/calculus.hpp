#pragma once

// Jet partial derivatives, total derivatives, substitution and the
// deformation operator.  All three derivative operators are derivations on
// the canonical expression algebra, fixed by their action on atoms and
// extended by the product rule and the chain rule through elementary
// functions.

#include <functional>
#include <map>

#include "varjet/expr.hpp"

namespace varjet {

inline Expr func_derivative(const FuncApp& f) {
    switch (f.fn) {
        case Func::Sin: return apply_func(Func::Cos, *f.arg);
        case Func::Cos: return -apply_func(Func::Sin, *f.arg);
        case Func::Exp: return apply_func(Func::Exp, *f.arg);
    }
    return Expr();
}

// Extends an atom-level derivation d to the whole algebra.  d receives every
// non-function atom; function atoms are handled by the chain rule.
template <typename AtomDeriv>
Expr derive(const Expr& e, AtomDeriv&& d) {
    std::function<Expr(const Atom&)> datom = [&](const Atom& a) -> Expr {
        if (const auto* f = std::get_if<FuncApp>(&a)) {
            Expr darg = derive(*f->arg, d);
            if (darg.is_zero()) return Expr();
            return func_derivative(*f) * darg;
        }
        return d(a);
    };
    Expr result;
    for (const Monomial& m : e.terms()) {
        for (size_t i = 0; i < m.powers.size(); ++i) {
            Expr da = datom(m.powers[i].first);
            if (da.is_zero()) continue;
            Monomial rest;
            rest.coeff = m.coeff * m.powers[i].second;
            for (size_t j = 0; j < m.powers.size(); ++j) {
                int exp = m.powers[j].second - (j == i ? 1 : 0);
                if (exp != 0) rest.powers.push_back({m.powers[j].first, exp});
            }
            std::vector<Monomial> one{std::move(rest)};
            result += Expr::from_terms(std::move(one)) * da;
        }
    }
    return result;
}

// Partial derivative treating each canonical atom as an independent
// coordinate (with the chain rule through elementary functions).
inline Expr diff_atom(const Expr& e, const Atom& x) {
    return derive(e, [&](const Atom& a) {
        return atom_eq(a, x) ? Expr::integer(1) : Expr();
    });
}

inline Expr partial_jet(const Expr& e, const JetCoord& c) { return diff_atom(e, Atom(c)); }

// D_mu: total derivative along base coordinate x^mu.
inline Expr total_derivative(const Expr& e, int mu) {
    return derive(e, [&](const Atom& a) -> Expr {
        if (const auto* j = std::get_if<JetCoord>(&a))
            return Expr::jet(JetCoord(j->field, j->tier, j->index.appended(mu)));
        if (const auto* b = std::get_if<BaseCoord>(&a))
            return b->mu == mu ? Expr::integer(1) : Expr();
        return Expr();  // parameters
    });
}

// Deformation operator: phi -> eta, eta -> rho, each index preserved;
// x and parameters are annihilated.  Tier-2 input is rejected.
inline Expr deform(const Expr& e) {
    return derive(e, [&](const Atom& a) -> Expr {
        if (const auto* j = std::get_if<JetCoord>(&a)) {
            if (j->tier >= 2)
                throw UnsupportedTierError("deform applied to a tier-2 coordinate");
            return Expr::jet(JetCoord(j->field, j->tier + 1, j->index));
        }
        return Expr();
    });
}

using Bindings = std::map<Atom, Expr, AtomLess>;

// Simultaneous substitution of canonical atoms, then canonicalization.
// A binding for a jet coordinate does not bind its derivative coordinates.
// Function arguments are substituted recursively.
inline Expr substitute(const Expr& e, const Bindings& bindings) {
    std::vector<Monomial> out;
    Expr result;
    for (const Monomial& m : e.terms()) {
        Expr term = Expr::constant(m.coeff);
        for (const auto& [a, k] : m.powers) {
            auto it = bindings.find(a);
            if (it != bindings.end()) {
                term = term * pow(it->second, k);
            } else if (const auto* f = std::get_if<FuncApp>(&a)) {
                Expr arg = substitute(*f->arg, bindings);
                term = term * pow(apply_func(f->fn, arg), k);
            } else {
                term = term * pow(Expr::atom(a), k);
            }
        }
        result += term;
    }
    return result;
}

// Visits every non-function atom in e, descending into function arguments.
template <typename Fn>
void for_each_atom(const Expr& e, Fn&& fn) {
    for (const Monomial& m : e.terms())
        for (const auto& [a, k] : m.powers) {
            if (const auto* f = std::get_if<FuncApp>(&a))
                for_each_atom(*f->arg, fn);
            else
                fn(a);
        }
}

inline int jet_order(const Expr& e) {
    int order = 0;
    for_each_atom(e, [&](const Atom& a) {
        if (const auto* j = std::get_if<JetCoord>(&a))
            order = std::max(order, j->index.order());
    });
    return order;
}

inline int max_tier(const Expr& e) {
    int tier = 0;
    for_each_atom(e, [&](const Atom& a) {
        if (const auto* j = std::get_if<JetCoord>(&a)) tier = std::max(tier, j->tier);
    });
    return tier;
}

inline bool contains_base_coord(const Expr& e) {
    bool found = false;
    for_each_atom(e, [&](const Atom& a) {
        if (std::holds_alternative<BaseCoord>(a)) found = true;
    });
    return found;
}

inline std::vector<JetCoord> collect_jets(const Expr& e) {
    std::vector<JetCoord> jets;
    for_each_atom(e, [&](const Atom& a) {
        if (const auto* j = std::get_if<JetCoord>(&a)) jets.push_back(*j);
    });
    std::sort(jets.begin(), jets.end());
    jets.erase(std::unique(jets.begin(), jets.end()), jets.end());
    return jets;
}

// Truncates every tier-t coordinate to zero.
inline Expr drop_tier(const Expr& e, int tier) {
    Bindings zero;
    for (const JetCoord& j : collect_jets(e))
        if (j.tier == tier) zero.emplace(Atom(j), Expr());
    return zero.empty() ? e : substitute(e, zero);
}

}  // namespace varjet
