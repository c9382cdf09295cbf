#pragma once

// Reduction of Euler-Lagrange systems (n = 1) to first-order form and a
// fixed-step RK4 integrator.  Each equation must be affine in the
// highest-order derivatives; the linear solve runs per evaluated state.

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "varjet/eval.hpp"
#include "varjet/linalg.hpp"
#include "varjet/problem.hpp"
#include "varjet/varcalc.hpp"

namespace varjet {

struct Trajectory {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<std::string> names;           // state coordinate names
    std::vector<std::vector<double>> states;  // one row per grid point

    double time(size_t i) const { return t0 + dt * static_cast<double>(i); }
};

class OdeSystem {
  public:
    // unknowns: (field, tier) pairs, one per equation; every equation is
    // taken as "= 0" and the system is solved for each unknown's highest
    // time derivative.
    OdeSystem(const Problem& p, std::vector<Expr> equations,
              std::vector<std::pair<int, int>> unknowns,
              const std::map<std::string, double>& param_overrides = {}) {
        if (p.n != 1)
            throw UnsupportedProblemError(p.name + ": only n = 1 problems integrate as ODEs");
        if (equations.size() != unknowns.size())
            throw UnsupportedProblemError(p.name + ": equation/unknown count mismatch");

        // order per unknown
        std::vector<int> order(unknowns.size(), 0);
        for (const Expr& e : equations)
            for (const JetCoord& j : collect_jets(e))
                for (size_t u = 0; u < unknowns.size(); ++u)
                    if (j.field == unknowns[u].first && j.tier == unknowns[u].second)
                        order[u] = std::max(order[u], j.index.order());
        for (size_t u = 0; u < unknowns.size(); ++u)
            if (order[u] == 0)
                throw UnsupportedProblemError(p.name + ": no derivatives of unknown " +
                                              state_name(p, unknowns[u], 0));

        // slot layout: 0 = t, then state coordinates in unknown order
        std::map<Atom, int, AtomLess> slot;
        slot[BaseCoord{0}] = 0;
        for (size_t u = 0; u < unknowns.size(); ++u)
            for (int j = 0; j < order[u]; ++j) {
                JetCoord c(unknowns[u].first, unknowns[u].second, std::vector<int>(j, 0));
                slot[Atom(c)] = 1 + static_cast<int>(layout_.size());
                layout_.push_back(c);
                names_.push_back(state_name(p, unknowns[u], j));
            }

        std::vector<double> param_slots;
        auto index_of = [&](const Atom& a) -> int {
            auto it = slot.find(a);
            if (it != slot.end()) return it->second;
            if (const auto* pr = std::get_if<Param>(&a)) {
                auto ov = param_overrides.find(pr->name);
                double v;
                if (ov != param_overrides.end()) {
                    v = ov->second;
                } else {
                    auto pv = p.parameters.find(pr->name);
                    if (pv == p.parameters.end() || !pv->second)
                        throw UnboundAtomError("parameter '" + pr->name + "' has no value");
                    v = pv->second->convert_to<double>();
                }
                int s = 1 + static_cast<int>(layout_.size()) + static_cast<int>(param_slots.size());
                param_slots.push_back(v);
                slot[a] = s;
                return s;
            }
            throw UnboundAtomError("atom '" + format_expr(Expr::atom(a), Style::Plain) +
                                   "' is not part of the ODE state");
        };

        // split each equation into sum(coeff_u * top_u) + rest
        const size_t m = unknowns.size();
        Bindings drop_tops;
        std::vector<JetCoord> tops;
        for (size_t u = 0; u < m; ++u) {
            JetCoord top(unknowns[u].first, unknowns[u].second, std::vector<int>(order[u], 0));
            tops.push_back(top);
            drop_tops.emplace(Atom(top), Expr());
        }
        auto contains_top = [&](const Expr& e) {
            for (const JetCoord& j : collect_jets(e))
                for (const JetCoord& t : tops)
                    if (j == t) return true;
            return false;
        };
        mass_.assign(m * m, CompiledExpr());
        rest_.clear();
        for (size_t i = 0; i < m; ++i) {
            Expr rest = substitute(equations[i], drop_tops);
            Expr rebuilt = rest;
            for (size_t u = 0; u < m; ++u) {
                Expr coeff = partial_jet(equations[i], tops[u]);
                if (contains_top(coeff))
                    throw UnsupportedProblemError(
                        p.name + ": equation not affine in highest derivatives");
                rebuilt += coeff * Expr::jet(tops[u]);
                mass_[i * m + u] = CompiledExpr(coeff, index_of);
            }
            if (!(rebuilt == equations[i]))
                throw UnsupportedProblemError(p.name +
                                              ": equation not affine in highest derivatives");
            rest_.push_back(CompiledExpr(rest, index_of));
        }
        order_ = std::move(order);
        unknowns_ = std::move(unknowns);
        params_ = std::move(param_slots);
        index_of_ = [slot](const Atom& a) {
            auto it = slot.find(a);
            if (it == slot.end())
                throw UnboundAtomError("atom '" + format_expr(Expr::atom(a), Style::Plain) +
                                       "' is not part of the ODE state");
            return it->second;
        };
    }

    int state_size() const { return static_cast<int>(layout_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<JetCoord>& layout() const { return layout_; }

    // Compiles an expression against this system's state layout (plus bound
    // parameters); usable for observables along trajectories.
    CompiledExpr compile(const Expr& e) const { return CompiledExpr(e, index_of_); }

    double eval(const CompiledExpr& ce, double t, const std::vector<double>& y) const {
        return ce.eval(fill_slots(t, y));
    }

    std::vector<double> rhs(double t, const std::vector<double>& y) const {
        std::vector<double> slots = fill_slots(t, y);
        const size_t m = unknowns_.size();
        Matrix<double> a(static_cast<int>(m), static_cast<int>(m));
        std::vector<double> b(m);
        for (size_t i = 0; i < m; ++i) {
            for (size_t u = 0; u < m; ++u)
                a.at(static_cast<int>(i), static_cast<int>(u)) = mass_[i * m + u].eval(slots);
            b[i] = -rest_[i].eval(slots);
        }
        std::vector<double> top = lu_solve(std::move(a), std::move(b));
        std::vector<double> dy(y.size());
        size_t base = 0;
        for (size_t u = 0; u < m; ++u) {
            for (int j = 0; j + 1 < order_[u]; ++j) dy[base + j] = y[base + j + 1];
            dy[base + order_[u] - 1] = top[u];
            base += order_[u];
        }
        return dy;
    }

  private:
    static std::string state_name(const Problem& p, std::pair<int, int> unknown, int deriv) {
        std::string base = p.field_names[unknown.first];
        if (unknown.second == 1) base = "eta_" + base;
        if (unknown.second == 2) base = "rho_" + base;
        if (deriv > 0) base += "_d" + std::to_string(deriv);
        return base;
    }

    std::vector<double> fill_slots(double t, const std::vector<double>& y) const {
        std::vector<double> slots(1 + y.size() + params_.size());
        slots[0] = t;
        std::copy(y.begin(), y.end(), slots.begin() + 1);
        std::copy(params_.begin(), params_.end(), slots.begin() + 1 + y.size());
        return slots;
    }

    std::vector<std::pair<int, int>> unknowns_;
    std::vector<int> order_;
    std::vector<JetCoord> layout_;
    std::vector<std::string> names_;
    std::vector<CompiledExpr> mass_;
    std::vector<CompiledExpr> rest_;
    std::vector<double> params_;
    std::function<int(const Atom&)> index_of_;
};

// Euler-Lagrange system of L0 in the phi unknowns.
inline OdeSystem build_el_ode(const Problem& p,
                              const std::map<std::string, double>& params = {}) {
    ELResult el = euler_lagrange(p);
    std::vector<std::pair<int, int>> unknowns;
    for (int A = 0; A < p.field_count(); ++A) unknowns.push_back({A, 0});
    return OdeSystem(p, el.by_field, unknowns, params);
}

// Doubled (phi, eta) system: all Euler-Lagrange derivatives of L1.
inline OdeSystem build_doubled_ode(const Problem& p,
                                   const std::map<std::string, double>& params = {}) {
    Expr L1 = l1(p);
    std::vector<Expr> eqs;
    std::vector<std::pair<int, int>> unknowns;
    for (int A = 0; A < p.field_count(); ++A) {
        eqs.push_back(euler_lagrange_expr(L1, A, 1, p.n));  // = deltaL0/deltaphi^A
        unknowns.push_back({A, 0});
    }
    for (int A = 0; A < p.field_count(); ++A) {
        eqs.push_back(euler_lagrange_expr(L1, A, 0, p.n));  // Jacobi equation for eta^A
        unknowns.push_back({A, 1});
    }
    return OdeSystem(p, eqs, unknowns, params);
}

inline Trajectory integrate(const OdeSystem& sys, std::vector<double> y0, double t0, double t1,
                            double dt) {
    if (dt <= 0) throw UnsupportedProblemError("dt must be positive");
    double steps_f = (t1 - t0) / dt;
    long long steps = std::llround(steps_f);
    if (steps < 0 || std::fabs(steps_f - static_cast<double>(steps)) > 1e-9)
        throw UnsupportedProblemError("(t1 - t0) / dt must be integral");
    if (static_cast<int>(y0.size()) != sys.state_size())
        throw UnsupportedProblemError("initial state has wrong dimension");

    Trajectory traj;
    traj.t0 = t0;
    traj.dt = dt;
    traj.names = sys.names();
    traj.states.reserve(steps + 1);
    traj.states.push_back(y0);

    std::vector<double> y = std::move(y0);
    for (long long s = 0; s < steps; ++s) {
        double t = t0 + dt * static_cast<double>(s);
        std::vector<double> k1 = sys.rhs(t, y);
        std::vector<double> y2(y.size());
        for (size_t i = 0; i < y.size(); ++i) y2[i] = y[i] + 0.5 * dt * k1[i];
        std::vector<double> k2 = sys.rhs(t + 0.5 * dt, y2);
        for (size_t i = 0; i < y.size(); ++i) y2[i] = y[i] + 0.5 * dt * k2[i];
        std::vector<double> k3 = sys.rhs(t + 0.5 * dt, y2);
        for (size_t i = 0; i < y.size(); ++i) y2[i] = y[i] + dt * k3[i];
        std::vector<double> k4 = sys.rhs(t + dt, y2);
        for (size_t i = 0; i < y.size(); ++i)
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        for (double v : y)
            if (!std::isfinite(v)) throw Error("non-finite state at t = " + std::to_string(t + dt));
        traj.states.push_back(y);
    }
    return traj;
}

inline void write_csv(const Trajectory& traj, std::ostream& os,
                      const std::vector<std::string>& extra_names = {},
                      const std::vector<std::vector<double>>& extra_cols = {}) {
    os << "t";
    for (const std::string& n : traj.names) os << "," << n;
    for (const std::string& n : extra_names) os << "," << n;
    os << "\n";
    os.precision(17);
    for (size_t i = 0; i < traj.states.size(); ++i) {
        os << traj.time(i);
        for (double v : traj.states[i]) os << "," << v;
        for (const auto& col : extra_cols) os << "," << col[i];
        os << "\n";
    }
}

}  // namespace varjet
