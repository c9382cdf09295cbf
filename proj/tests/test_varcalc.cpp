#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "varjet/eval.hpp"
#include "varjet/linalg.hpp"
#include "varjet/parser.hpp"
#include "varjet/random_lagrangian.hpp"
#include "varjet/varcalc.hpp"

using namespace varjet;

namespace {

Expr jet(int f, int t, std::vector<int> idx) { return Expr::jet(f, t, std::move(idx)); }

Problem shadwick() {
    return parse_problem("dim 2; field phi; L = phi*(phi_00*phi_11 - phi_01^2);", "shadwick");
}

Problem riewe() {
    return parse_problem(
        "dim 1; field q[3]; param m = 1; param omega = 2;"
        "L = sum(i,0,2, 1/2*m*d(q[i],0)^2 - 1/2*(m/omega^2)*d(q[i],0,0)^2);",
        "riewe");
}

Problem klein_gordon() {
    return parse_problem("dim 2; field phi; param m = 1;"
                         "L = 1/2*(phi_0^2 - phi_1^2 - m^2*phi^2);",
                         "klein_gordon");
}

Problem sphere() {
    return parse_problem("dim 1; field theta; field phi;"
                         "L = 1/2*d(theta,0)^2 + 1/2*sin(theta)^2*d(phi,0)^2;",
                         "sphere");
}

}  // namespace

TEST_CASE("shadwick field equation and Jacobi equation") {
    Problem p = shadwick();
    Expr el = euler_lagrange(p).by_field[0];
    Expr expected =
        Rational(3) * (jet(0, 0, {0, 0}) * jet(0, 0, {1, 1}) - jet(0, 0, {0, 1}) * jet(0, 0, {0, 1}));
    CHECK(el == expected);

    Expr jac = jacobi_direct(p).by_field[0];
    Expr core = jet(0, 0, {1, 1}) * jet(0, 1, {0, 0}) + jet(0, 0, {0, 0}) * jet(0, 1, {1, 1}) -
                Rational(2) * jet(0, 0, {0, 1}) * jet(0, 1, {0, 1});
    CHECK(jac == Rational(3) * core);
    CHECK(normalize_equation(jac) == core);
}

TEST_CASE("riewe field equation, deformed Lagrangians and Jacobi equation") {
    Problem p = riewe();
    Expr m = Expr::param("m"), w = Expr::param("omega");
    ELResult el = euler_lagrange(p);
    for (int A = 0; A < 3; ++A) {
        Expr expected = Rational(-1) * m * (jet(A, 0, {0, 0}) + pow(w, -2) * jet(A, 0, {0, 0, 0, 0}));
        CHECK(el.by_field[A] == expected);
    }

    // per-component second deformation: 1/2 m eta_dot^2 - 1/2 (m/omega^2) eta_ddot^2
    Expr expected_l2;
    for (int A = 0; A < 3; ++A)
        expected_l2 += Rational(1, 2) * m * pow(jet(A, 1, {0}), 2) -
                       Rational(1, 2) * m * pow(w, -2) * pow(jet(A, 1, {0, 0}), 2);
    CHECK(l2(p) == expected_l2);

    ELResult jac = jacobi_direct(p);
    for (int A = 0; A < 3; ++A) {
        CHECK(normalize_equation(jac.by_field[A]) ==
              jet(A, 1, {0, 0}) + pow(w, -2) * jet(A, 1, {0, 0, 0, 0}));
    }
}

TEST_CASE("riewe momenta") {
    Problem p = riewe();
    Expr m = Expr::param("m"), w = Expr::param("omega");
    MomentaResult mom = momenta(p);
    for (int A = 0; A < 3; ++A) {
        CHECK(mom.p[A][0] == m * jet(A, 0, {0}) + m * pow(w, -2) * jet(A, 0, {0, 0, 0}));
        CHECK(mom.n[A].at({0, 0}) == Rational(-1) * m * pow(w, -2) * jet(A, 0, {0, 0}));
    }
}

TEST_CASE("klein-gordon hierarchy, equations and energy density") {
    Problem p = klein_gordon();
    Expr m = Expr::param("m");
    Expr phi = jet(0, 0, {}), eta = jet(0, 1, {});

    CHECK(l1(p) == jet(0, 0, {0}) * jet(0, 1, {0}) - jet(0, 0, {1}) * jet(0, 1, {1}) -
                       m * m * phi * eta);
    CHECK(l2(p) == Rational(1, 2) * (pow(jet(0, 1, {0}), 2) - pow(jet(0, 1, {1}), 2) -
                                     m * m * eta * eta));

    Expr el = euler_lagrange(p).by_field[0];
    CHECK(el == jet(0, 0, {1, 1}) - jet(0, 0, {0, 0}) - m * m * phi);
    Expr jac = jacobi_direct(p).by_field[0];
    CHECK(jac == jet(0, 1, {1, 1}) - jet(0, 1, {0, 0}) - m * m * eta);
    CHECK(normalize_equation(jac) ==
          Rational(-1) * (jet(0, 1, {0, 0}) - jet(0, 1, {1, 1}) + m * m * eta));

    EMTensor em = energy_momentum(p);
    CHECK(em.at(0, 0) == jet(0, 0, {0}) * jet(0, 1, {0}) + jet(0, 0, {1}) * jet(0, 1, {1}) +
                             m * m * phi * eta);
}

TEST_CASE("sphere geodesic equations carry the 2-sphere Christoffel symbols") {
    Problem p = sphere();
    Expr st = apply_func(Func::Sin, jet(0, 0, {}));
    Expr ct = apply_func(Func::Cos, jet(0, 0, {}));
    ELResult el = euler_lagrange(p);
    // delta L / delta theta = sin cos phidot^2 - thetaddot
    CHECK(el.by_field[0] == st * ct * pow(jet(1, 0, {0}), 2) - jet(0, 0, {0, 0}));
    // delta L / delta phi = -(sin^2 phiddot + 2 sin cos thetadot phidot)
    CHECK(el.by_field[1] == Rational(-1) * st * st * jet(1, 0, {0, 0}) -
                                Rational(2) * st * ct * jet(0, 0, {0}) * jet(1, 0, {0}));
    // first deformation of the metric Lagrangian
    Expr expected_l1 = st * ct * pow(jet(1, 0, {0}), 2) * jet(0, 1, {}) +
                       jet(0, 0, {0}) * jet(0, 1, {0}) + st * st * jet(1, 0, {0}) * jet(1, 1, {0});
    CHECK(l1(p) == expected_l1);
}

TEST_CASE("deformation identities on the corpus") {
    for (Problem p : {shadwick(), riewe(), klein_gordon(), sphere()}) {
        Expr L1 = l1(p), L2 = l2(p);
        CHECK(L1 == deform(p.lagrangian));
        CHECK(Rational(2) * L2 == drop_tier(deform(deform(p.lagrangian)), 2));
        for (int A = 0; A < p.field_count(); ++A) {
            CHECK(euler_lagrange_expr(L1, A, 1, p.n) == euler_lagrange(p).by_field[A]);
            Expr jac = euler_lagrange_expr(L2, A, 1, p.n);
            CHECK(jac == euler_lagrange_expr(L1, A, 0, p.n));
            CHECK(jac == jacobi_direct(p).by_field[A]);
        }
    }
}

TEST_CASE("first variation splits into bulk plus boundary current") {
    std::mt19937 rng(31);
    RandomSpec spec;
    spec.allow_funcs = true;
    for (int i = 0; i < 40; ++i) {
        Problem p = random_problem(rng, spec);
        Expr lhs = deform(p.lagrangian);
        Expr rhs;
        ELResult el = euler_lagrange(p);
        for (int A = 0; A < p.field_count(); ++A) rhs += el.by_field[A] * jet(A, 1, {});
        CurrentResult b = boundary_current(p);
        for (int mu = 0; mu < p.n; ++mu) rhs += total_derivative(b.components[mu], mu);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("l1 and l2 are homogeneous of degree 1 and 2 in the variation") {
    std::mt19937 rng(37);
    Expr t = Expr::param("t_scale");
    for (int i = 0; i < 40; ++i) {
        Problem p = random_problem(rng);
        Expr L1 = l1(p), L2 = l2(p);
        Bindings scale;
        for (const Expr& e : {L1, L2})
            for (const JetCoord& j : collect_jets(e))
                if (j.tier == 1) scale.emplace(Atom(j), t * Expr::jet(j));
        CHECK(substitute(L1, scale) == t * L1);
        CHECK(substitute(L2, scale) == t * t * L2);
    }
}

TEST_CASE("all six integration-by-parts forms recover twice the second deformation") {
    for (Problem p : {shadwick(), riewe(), klein_gordon(), sphere()}) {
        Expr target = Rational(2) * l2(p);
        for (IbpVariant v : {IbpVariant::A1, IbpVariant::A2, IbpVariant::A3, IbpVariant::A4,
                             IbpVariant::Unified, IbpVariant::SelfAdjoint}) {
            IbpForm form = ibp_form(p, v);
            Expr sum = form.bulk;
            for (int mu = 0; mu < p.n; ++mu)
                sum += total_derivative(form.current.components[mu], mu);
            CHECK(sum == target);
        }
    }
}

TEST_CASE("equivalence modulo divergences") {
    Problem p = klein_gordon();
    Expr L = p.lagrangian;
    Expr shifted = L + total_derivative(jet(0, 0, {}) * jet(0, 0, {0}), 0) +
                   total_derivative(pow(jet(0, 0, {}), 3), 1);
    auto eq = equivalent_mod_divergence(L, shifted);
    CHECK(eq.equivalent);
    auto neq = equivalent_mod_divergence(L, L + jet(0, 0, {}));
    CHECK_FALSE(neq.equivalent);
    bool found_nonzero = false;
    for (const auto& [key, r] : neq.residuals) found_nonzero = found_nonzero || !r.is_zero();
    CHECK(found_nonzero);
}

TEST_CASE("divergences have vanishing variational derivative at any order") {
    std::mt19937 rng(41);
    RandomSpec spec;
    spec.allow_funcs = true;
    for (int i = 0; i < 60; ++i) {
        Problem p = random_problem(rng, spec);
        Expr v = random_polynomial(rng, p.n, p.field_count(), spec);
        Expr div;
        for (int mu = 0; mu < p.n; ++mu) div += total_derivative(v, mu);
        for (int A = 0; A < p.field_count(); ++A)
            CHECK(euler_lagrange_expr(div, A, 0, p.n).is_zero());
    }
}

TEST_CASE("Hessian of the first deformation squares the base Hessian determinant") {
    std::mt19937 rng(43);
    RandomSpec spec;
    spec.max_order = 1;  // first-order Lagrangians
    int checked = 0;
    while (checked < 10) {
        Problem p = random_problem(rng, spec);
        HessianMatrix w0 = hessian_l0(p);
        HessianMatrix w1 = hessian_matrix(p);
        bool trivially_zero = true;
        for (const Expr& e : w0.entries) trivially_zero = trivially_zero && e.is_zero();
        if (trivially_zero) continue;  // not first-order-regular
        ++checked;
        for (int pt = 0; pt < 20; ++pt) {
            std::map<Atom, Rational, AtomLess> point;
            for (const Expr& e : w1.entries)
                for_each_atom(e, [&](const Atom& a) {
                    if (!point.count(a)) point[a] = random_rational(rng, 5, 3);
                });
            auto eval_det = [&](const HessianMatrix& w) {
                Matrix<Rational> m(w.dim, w.dim);
                for (int i = 0; i < w.dim; ++i)
                    for (int j = 0; j < w.dim; ++j) m.at(i, j) = evaluate_rational(w.at(i, j), point);
                return determinant(m);
            };
            Rational d1 = eval_det(w1);
            Rational d0 = eval_det(w0);
            Rational sq = d0 * d0;
            CHECK((d1 == sq || d1 == -sq));
        }
    }
}
