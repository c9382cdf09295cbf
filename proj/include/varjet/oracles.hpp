#pragma once

// Quadrature-based action oracles, finite-difference variation checks,
// conservation drift, geodesic deviation and the Klein-Gordon mode check.
// These are deliberately independent of the symbolic identities they probe:
// quadrature plus difference quotients on one side, exact derivation on the
// other.

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "varjet/eval.hpp"
#include "varjet/ode.hpp"
#include "varjet/varcalc.hpp"

namespace varjet {

// Time derivatives of every (field, tier) component along a mechanics path:
// value(field, tier, deriv_order, t).
using PathJets = std::function<double(int, int, int, double)>;

// Analytic component values only; derivatives by iterated central
// differences of step h (2nd order accurate per level).
inline PathJets fd_jets(std::function<double(int, int, double)> value, double h) {
    auto self = std::make_shared<std::function<double(int, int, int, double)>>();
    *self = [value, h, self](int field, int tier, int order, double t) -> double {
        if (order == 0) return value(field, tier, t);
        return ((*self)(field, tier, order - 1, t + h) - (*self)(field, tier, order - 1, t - h)) /
               (2.0 * h);
    };
    return [self](int field, int tier, int order, double t) { return (*self)(field, tier, order, t); };
}

enum class Which { L0, L1, L2 };

namespace detail {

inline Expr which_lagrangian(const Problem& p, Which which) {
    switch (which) {
        case Which::L0: return p.lagrangian;
        case Which::L1: return l1(p);
        default: return l2(p);
    }
}

inline NumericState path_state(const Problem& p, const Expr& e, const PathJets& path, double t,
                               const std::map<std::string, double>& params) {
    NumericState s;
    s.bind_base(0, t);
    for (const auto& [name, value] : p.parameters)
        if (value) s.bind_param(name, value->convert_to<double>());
    for (const auto& [name, v] : params) s.bind_param(name, v);
    for (const JetCoord& j : collect_jets(e))
        s.bind_jet(j, path(j.field, j.tier, j.index.order(), t));
    return s;
}

}  // namespace detail

// Composite Simpson approximation of the action integral of L0/L1/l2 along
// a path.  segments must be even and >= 2 (>= 3 grid points).
inline double action_quadrature(const Problem& p, const PathJets& path, Which which, double t0,
                                double t1, int segments,
                                const std::map<std::string, double>& params = {}) {
    if (segments < 2 || segments % 2 != 0)
        throw UnsupportedProblemError("Simpson quadrature needs an even segment count >= 2");
    Expr L = detail::which_lagrangian(p, which);
    double h = (t1 - t0) / segments;
    double total = 0.0;
    for (int i = 0; i <= segments; ++i) {
        double t = t0 + h * i;
        double w = (i == 0 || i == segments) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        total += w * evaluate(L, detail::path_state(p, L, path, t, params));
    }
    return total * h / 3.0;
}

struct VariationResult {
    double first = 0.0;   // (S(eps) - S(-eps)) / (2 eps)
    double second = 0.0;  // (S(eps) - 2 S(0) + S(-eps)) / eps^2
};

// Central difference quotients of the action along phi0 + eps * eta.
// Contracts: first ~ integral of L1, second ~ 2 * integral of l2.
inline VariationResult variation_fd(const Problem& p, const PathJets& base, const PathJets& eta,
                                    double eps, double t0, double t1, int segments,
                                    const std::map<std::string, double>& params = {}) {
    if (eps <= 0) throw UnsupportedProblemError("eps must be positive");
    auto shifted = [&](double e) -> PathJets {
        return [&, e](int field, int tier, int order, double t) {
            return base(field, tier, order, t) + e * eta(field, tier, order, t);
        };
    };
    double s_plus = action_quadrature(p, shifted(eps), Which::L0, t0, t1, segments, params);
    double s_zero = action_quadrature(p, base, Which::L0, t0, t1, segments, params);
    double s_minus = action_quadrature(p, shifted(-eps), Which::L0, t0, t1, segments, params);
    VariationResult r;
    r.first = (s_plus - s_minus) / (2.0 * eps);
    r.second = (s_plus - 2.0 * s_zero + s_minus) / (eps * eps);
    return r;
}

struct DriftReport {
    double initial = 0.0;
    double max_abs_drift = 0.0;
    double relative_drift = 0.0;
};

// Drift of H^0_0 along a doubled-system trajectory.  Requires a Lagrangian
// free of explicit base-coordinate dependence.
inline DriftReport conservation_check(const Problem& p, const OdeSystem& sys,
                                      const Trajectory& traj) {
    if (contains_base_coord(p.lagrangian))
        throw InapplicableError(p.name + ": explicit x-dependence, H is not conserved");
    EMTensor em = energy_momentum(p);
    CompiledExpr h = sys.compile(em.at(0, 0));
    DriftReport rep;
    rep.initial = sys.eval(h, traj.time(0), traj.states[0]);
    for (size_t i = 0; i < traj.states.size(); ++i) {
        double v = sys.eval(h, traj.time(i), traj.states[i]);
        rep.max_abs_drift = std::max(rep.max_abs_drift, std::fabs(v - rep.initial));
    }
    rep.relative_drift = rep.max_abs_drift / std::max(1.0, std::fabs(rep.initial));
    return rep;
}

struct DeviationReport {
    double discrepancy = 0.0;     // max |(gamma_h - gamma_0)/h - eta|
    double pair_mismatch = 0.0;   // doubled system vs (EL, Jacobi) system
};

// Finite-difference geodesic deviation against the engine-derived Jacobi
// field, plus the doubled-system/Jacobi-pair comparison.  base_y0 lays out
// the EL system state (order-major per field), direction perturbs it; the
// doubled run seeds eta with the direction.  singular_guard, when supplied,
// aborts the run on chart degeneracy.
inline DeviationReport geodesic_deviation_oracle(
    const Problem& p, const std::vector<double>& base_y0, const std::vector<double>& direction,
    double h, double t0, double t1, double dt,
    const std::function<bool(const std::vector<double>&)>& singular_guard = {}) {
    if (h <= 0) throw UnsupportedProblemError("h must be positive");
    OdeSystem el_sys = build_el_ode(p);
    std::vector<double> pert = base_y0;
    for (size_t i = 0; i < pert.size(); ++i) pert[i] += h * direction[i];

    Trajectory base = integrate(el_sys, base_y0, t0, t1, dt);
    Trajectory bumped = integrate(el_sys, pert, t0, t1, dt);
    if (singular_guard)
        for (const auto& row : base.states)
            if (singular_guard(row)) throw Error(p.name + ": chart singularity reached");

    std::vector<double> dy0 = base_y0;
    dy0.insert(dy0.end(), direction.begin(), direction.end());
    OdeSystem doubled = build_doubled_ode(p);
    Trajectory joint = integrate(doubled, dy0, t0, t1, dt);

    // same state layout, second derivation route: EL(L0) plus the direct
    // Jacobi equations
    std::vector<Expr> eqs;
    std::vector<std::pair<int, int>> unknowns;
    ELResult el = euler_lagrange(p);
    ELResult jac = jacobi_direct(p);
    for (int A = 0; A < p.field_count(); ++A) {
        eqs.push_back(el.by_field[A]);
        unknowns.push_back({A, 0});
    }
    for (int A = 0; A < p.field_count(); ++A) {
        eqs.push_back(jac.by_field[A]);
        unknowns.push_back({A, 1});
    }
    OdeSystem pair_sys(p, eqs, unknowns);
    Trajectory pair = integrate(pair_sys, dy0, t0, t1, dt);

    DeviationReport rep;
    const size_t m = base_y0.size();
    for (size_t i = 0; i < joint.states.size(); ++i) {
        for (size_t s = 0; s < m; ++s) {
            double eta = joint.states[i][m + s];
            double fd = (bumped.states[i][s] - base.states[i][s]) / h;
            rep.discrepancy = std::max(rep.discrepancy, std::fabs(fd - eta));
        }
        for (size_t s = 0; s < joint.states[i].size(); ++s)
            rep.pair_mismatch =
                std::max(rep.pair_mismatch, std::fabs(joint.states[i][s] - pair.states[i][s]));
    }
    return rep;
}

struct KgModeReport {
    double max_residual = 0.0;         // EL and Jacobi residuals at sample points
    double energy_initial = 0.0;       // E(t0) = integral of H^0_0 over one period
    double energy_drift_rel = 0.0;     // max relative deviation across sample times
    std::vector<double> energies;
};

// Single real Klein-Gordon mode phi = a cos(k x - w t) + b sin(k x - w t),
// w = sqrt(k^2 + m^2), with an eta mode of the same frequency.  Checks the
// field/Jacobi equations pointwise and the constancy of the spatial energy
// integral (trapezoid; exact period).
inline KgModeReport kg_mode_check(double m, double k, double a_phi, double b_phi, double a_eta,
                                  double b_eta, int x_samples = 512, int t_samples = 10) {
    if (m <= 0) throw UnsupportedProblemError("kg_mode_check: m must be positive");
    Problem kg;
    kg.name = "klein_gordon";
    kg.n = 2;
    kg.field_names = {"phi"};
    Expr mm = Expr::param("m");
    Expr d0 = Expr::jet(0, 0, {0}), d1 = Expr::jet(0, 0, {1}), f = Expr::jet(0, 0, {});
    kg.lagrangian = Rational(1, 2) * (d0 * d0 - d1 * d1 - mm * mm * f * f);

    const double w = std::sqrt(k * k + m * m);
    // n-th derivative of (a cos u + b sin u) cycles (a, b) -> (b, -a)
    auto mode = [&](double a, double b, int dt_order, int dx_order, double t, double x) {
        double u = k * x - w * t;
        double ca = a, cb = b;
        for (int i = 0; i < dt_order + dx_order; ++i) {
            double na = cb, nb = -ca;
            ca = na;
            cb = nb;
        }
        double scale = std::pow(-w, dt_order) * std::pow(k, dx_order);
        return scale * (ca * std::cos(u) + cb * std::sin(u));
    };
    auto bind_jets = [&](NumericState& s, const Expr& e, double t, double x) {
        for (const JetCoord& j : collect_jets(e)) {
            int dt_order = 0, dx_order = 0;
            for (int mu : j.index.entries) (mu == 0 ? dt_order : dx_order)++;
            double a = j.tier == 0 ? a_phi : a_eta;
            double b = j.tier == 0 ? b_phi : b_eta;
            s.bind_jet(j, mode(a, b, dt_order, dx_order, t, x));
        }
    };

    const double period = (k != 0.0) ? 2.0 * M_PI / std::fabs(k) : 2.0 * M_PI;
    KgModeReport rep;
    Expr el = euler_lagrange(kg).by_field[0];
    Expr jac = jacobi_direct(kg).by_field[0];
    Expr h00 = energy_momentum(kg).at(0, 0);
    for (int ti = 0; ti < t_samples; ++ti) {
        double t = 0.37 + 0.61 * ti;
        double integral = 0.0;
        for (int xi = 0; xi <= x_samples; ++xi) {
            double x = period * xi / x_samples;
            NumericState s;
            s.bind_param("m", m);
            bind_jets(s, el, t, x);
            rep.max_residual = std::max(rep.max_residual, std::fabs(evaluate(el, s)));
            bind_jets(s, jac, t, x);
            rep.max_residual = std::max(rep.max_residual, std::fabs(evaluate(jac, s)));
            bind_jets(s, h00, t, x);
            double weight = (xi == 0 || xi == x_samples) ? 0.5 : 1.0;
            integral += weight * evaluate(h00, s);
        }
        rep.energies.push_back(integral * period / x_samples);
    }
    rep.energy_initial = rep.energies[0];
    double scale = std::max(1e-30, std::fabs(rep.energy_initial));
    for (double e : rep.energies)
        rep.energy_drift_rel =
            std::max(rep.energy_drift_rel, std::fabs(e - rep.energy_initial) / scale);
    return rep;
}

}  // namespace varjet
