#pragma once

// Seeded generators for random polynomial Lagrangians and random rational
// jet points, used by the property suites.

#include <map>
#include <random>
#include <string>
#include <vector>

#include "varjet/calculus.hpp"
#include "varjet/problem.hpp"

namespace varjet {

struct RandomSpec {
    int max_n = 2;       // base dimension
    int max_fields = 2;
    int max_order = 2;   // jet order
    int max_degree = 3;  // monomial degree
    int max_terms = 5;
    bool allow_funcs = false;  // wrap one factor in sin(.) occasionally
    bool allow_params = false;
};

inline Rational random_rational(std::mt19937& rng, int num_range = 6, int max_den = 4) {
    std::uniform_int_distribution<int> num(-num_range, num_range);
    std::uniform_int_distribution<int> den(1, max_den);
    int p = 0;
    while (p == 0) p = num(rng);
    return Rational(p, den(rng));
}

inline Expr random_polynomial(std::mt19937& rng, int n, int fields, const RandomSpec& spec) {
    std::uniform_int_distribution<int> term_count(1, spec.max_terms);
    std::uniform_int_distribution<int> degree(1, spec.max_degree);
    std::uniform_int_distribution<int> order(0, spec.max_order);
    std::uniform_int_distribution<int> field(0, fields - 1);
    std::uniform_int_distribution<int> index(0, n - 1);
    std::uniform_int_distribution<int> pct(0, 99);

    Expr total;
    const int terms = term_count(rng);
    for (int t = 0; t < terms; ++t) {
        Expr term = Expr::constant(random_rational(rng));
        const int deg = degree(rng);
        for (int d = 0; d < deg; ++d) {
            if (spec.allow_params && pct(rng) < 10) {
                term = term * Expr::param("a");
                continue;
            }
            std::vector<int> idx(order(rng));
            for (int& i : idx) i = index(rng);
            Expr factor = Expr::jet(field(rng), 0, idx);
            if (spec.allow_funcs && pct(rng) < 15) factor = apply_func(Func::Sin, factor);
            term = term * factor;
        }
        total += term;
    }
    if (total.is_zero()) total = Expr::jet(0, 0, {0}) * Expr::jet(0, 0, {0});
    return total;
}

inline Problem random_problem(std::mt19937& rng, const RandomSpec& spec = {}) {
    std::uniform_int_distribution<int> nd(1, spec.max_n);
    std::uniform_int_distribution<int> fd(1, spec.max_fields);
    Problem p;
    p.n = nd(rng);
    int fields = fd(rng);
    for (int A = 0; A < fields; ++A) p.field_names.push_back("q" + std::to_string(A));
    p.name = "random";
    if (spec.allow_params) p.parameters["a"] = Rational(3, 2);
    p.lagrangian = random_polynomial(rng, p.n, fields, spec);
    return p;
}

// Random rational values for every jet coordinate of e (both tiers) plus
// base coordinates and parameters, for exact pointwise evaluation.
inline std::map<Atom, Rational, AtomLess> random_jet_point(std::mt19937& rng, const Expr& e) {
    std::map<Atom, Rational, AtomLess> point;
    for_each_atom(e, [&](const Atom& a) {
        if (!std::holds_alternative<FuncApp>(a) && !point.count(a))
            point[a] = random_rational(rng, 5, 3);
    });
    return point;
}

}  // namespace varjet
