#pragma once

// Variational operators for second-order Lagrangians: Euler-Lagrange
// derivatives, boundary currents, the deformation hierarchy L0 -> L1 -> L2,
// the standard Jacobi form, integration-by-parts decompositions of the
// Hessian, canonical momenta, the energy-momentum tensor and the Hessian
// matrix of L1.
//
// Index conventions: jet coordinates are stored on sorted multi-indices and
// partial derivatives are plain coefficient extraction against the sorted
// representative.  Where a formula sums over ordered index pairs with the
// "tensor" second-derivative convention, the conversion factor 1/2 for
// off-diagonal pairs is applied explicitly (tensor_weight below).  The two
// conventions agree after contraction with symmetric objects.

#include <array>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "varjet/calculus.hpp"
#include "varjet/problem.hpp"

namespace varjet {

// Per-field variational derivatives for one tier.
struct ELResult {
    int tier = 0;
    std::vector<Expr> by_field;
};

// A divergence/boundary current B^mu, one component per base index.
struct CurrentResult {
    std::vector<Expr> components;
};

enum class IbpVariant { A1, A2, A3, A4, Unified, SelfAdjoint };

inline const char* ibp_variant_name(IbpVariant v) {
    switch (v) {
        case IbpVariant::A1: return "A1";
        case IbpVariant::A2: return "A2";
        case IbpVariant::A3: return "A3";
        case IbpVariant::A4: return "A4";
        case IbpVariant::Unified: return "UNIFIED";
        case IbpVariant::SelfAdjoint: return "SELFADJOINT";
    }
    return "?";
}

// Decomposition of the full Hessian D^2 L0|rho=0 = 2*l2 into bulk + D.current.
struct IbpForm {
    IbpVariant variant;
    Expr bulk;
    CurrentResult current;
};

struct MomentaResult {
    // tier-0 conjugates pi^mu_A, N^{mu nu}_A and tier-1 conjugates p^mu_A,
    // n^{mu nu}_A; N/n are symmetric and stored on sorted pairs.
    std::vector<std::vector<Expr>> pi;                 // [A][mu]
    std::vector<std::map<std::pair<int, int>, Expr>> N;  // [A][{mu<=nu}]
    std::vector<std::vector<Expr>> p;
    std::vector<std::map<std::pair<int, int>, Expr>> n;
};

struct EMTensor {
    int n = 0;
    std::vector<Expr> components;  // row-major H^mu_nu
    Expr& at(int mu, int nu) { return components[mu * n + nu]; }
    const Expr& at(int mu, int nu) const { return components[mu * n + nu]; }
};

namespace detail {

inline Rational tensor_weight(int mu, int nu) { return mu == nu ? Rational(1) : Rational(1, 2); }

// dL/d(c^A) at the given tier, plain extraction.
inline Expr p0(const Expr& L, int A, int tier) {
    return partial_jet(L, JetCoord(A, tier, std::vector<int>{}));
}
inline Expr p1(const Expr& L, int A, int tier, int mu) {
    return partial_jet(L, JetCoord(A, tier, {mu}));
}
// Sorted-multiset extraction for the second-order slot.
inline Expr p2s(const Expr& L, int A, int tier, int mu, int nu) {
    return partial_jet(L, JetCoord(A, tier, {mu, nu}));
}
// Tensor convention: the coefficient that appears in unordered double sums.
inline Expr p2t(const Expr& L, int A, int tier, int mu, int nu) {
    return tensor_weight(mu, nu) * p2s(L, A, tier, mu, nu);
}

}  // namespace detail

// Euler-Lagrange derivative of an arbitrary expression with respect to the
// given tier's coordinate family (multiset convention for the second-order
// term).  Coordinates of other tiers are treated as background.
inline Expr euler_lagrange_expr(const Expr& L, int field, int tier, int n) {
    (void)n;
    std::set<std::vector<int>> indices;
    indices.insert({});
    for (const JetCoord& j : collect_jets(L))
        if (j.field == field && j.tier == tier) indices.insert(j.index.entries);
    Expr r;
    for (const std::vector<int>& idx : indices) {
        Expr term = partial_jet(L, JetCoord(field, tier, idx));
        for (int mu : idx) term = total_derivative(term, mu);
        r += (idx.size() % 2 == 0) ? term : Rational(-1) * term;
    }
    return r;
}

inline ELResult euler_lagrange_all(const Expr& L, int tier, int n, int N) {
    ELResult res;
    res.tier = tier;
    for (int A = 0; A < N; ++A) res.by_field.push_back(euler_lagrange_expr(L, A, tier, n));
    return res;
}

inline ELResult euler_lagrange(const Problem& p, int tier = 0) {
    return euler_lagrange_all(p.lagrangian, tier, p.n, p.field_count());
}

// dL/d(c^A_mu) in the Euler-Lagrange sense: partial minus the divergence of
// the second-order partial.
inline Expr el_derivative_first(const Expr& L, int field, int tier, int mu, int n) {
    using namespace detail;
    Expr r = p1(L, field, tier, mu);
    for (int nu = 0; nu < n; ++nu) r -= total_derivative(p2t(L, field, tier, mu, nu), nu);
    return r;
}

// Boundary current of the first variation: pairs the Euler-Lagrange
// first-derivative with the next-tier coordinate so that
// deform(L) = sum_A EL_A * d(c^A) + sum_mu D_mu B^mu holds exactly.
inline CurrentResult boundary_current_expr(const Expr& L, int tier, int n, int N) {
    using namespace detail;
    CurrentResult cur;
    for (int mu = 0; mu < n; ++mu) {
        Expr b;
        for (int A = 0; A < N; ++A) {
            b += el_derivative_first(L, A, tier, mu, n) * Expr::jet(A, tier + 1, {});
            for (int nu = 0; nu < n; ++nu)
                b += p2t(L, A, tier, mu, nu) * Expr::jet(A, tier + 1, {nu});
        }
        cur.components.push_back(b);
    }
    return cur;
}

inline CurrentResult boundary_current(const Problem& p, int tier = 0) {
    return boundary_current_expr(p.lagrangian, tier, p.n, p.field_count());
}

// First deformed Lagrangian: the derivation phi -> eta applied to L0.
inline Expr l1(const Problem& p) { return deform(p.lagrangian); }

// Second deformed Lagrangian, half the rho-truncated second deformation.
// The 1/2 normalization makes delta l2/delta eta coincide with the standard
// Jacobi form and with delta L1/delta phi.
inline Expr l2(const Problem& p) {
    return Rational(1, 2) * drop_tier(deform(deform(p.lagrangian)), 2);
}

// Standard Jacobi form: second partials of L0 contracted with eta and its
// derivatives, assembled as three Euler-Lagrange style blocks.  Contracting
// a first partial of L0 with the eta family is exactly the deformation
// operator, which keeps the multiset bookkeeping in one place.
inline ELResult jacobi_direct(const Problem& p) {
    using namespace detail;
    const Expr& L = p.lagrangian;
    const int n = p.n;
    ELResult res;
    res.tier = 1;
    for (int A = 0; A < p.field_count(); ++A) {
        Expr j = deform(p0(L, A, 0));
        for (int mu = 0; mu < n; ++mu) j -= total_derivative(deform(p1(L, A, 0, mu)), mu);
        for (int mu = 0; mu < n; ++mu)
            for (int nu = mu; nu < n; ++nu)
                j += total_derivative(total_derivative(deform(p2s(L, A, 0, mu, nu)), nu), mu);
        res.by_field.push_back(j);
    }
    return res;
}

namespace detail {

// Building blocks for the Hessian decompositions.  All loops run over
// ordered tuples; second-order slots use the tensor convention.
struct IbpContext {
    const Expr& L;
    int n;
    int N;

    Expr eta(int A) const { return Expr::jet(A, 1, {}); }
    Expr eta1(int A, int mu) const { return Expr::jet(A, 1, {mu}); }
    Expr eta2(int A, int mu, int nu) const { return Expr::jet(A, 1, {mu, nu}); }

    // Tensor second partials of L with respect to tier-0 slots.
    Expr d00(int A, int B) const { return p0(p0(L, A, 0), B, 0); }
    Expr d01(int A, int B, int mu) const { return p1(p0(L, A, 0), B, 0, mu); }
    Expr d02(int A, int B, int mu, int nu) const { return p2t(p0(L, A, 0), B, 0, mu, nu); }
    Expr d11(int A, int mu, int B, int nu) const { return p1(p1(L, A, 0, mu), B, 0, nu); }
    Expr d12(int A, int mu, int B, int nu, int lam) const {
        return p2t(p1(L, A, 0, mu), B, 0, nu, lam);
    }
    Expr d22(int A, int mu, int nu, int B, int lam, int rho) const {
        return tensor_weight(mu, nu) * p2t(p2s(L, A, 0, mu, nu), B, 0, lam, rho);
    }

    Expr el0(int B) const { return euler_lagrange_expr(L, B, 0, n); }
    Expr el1(int B, int mu) const { return el_derivative_first(L, B, 0, mu, n); }

    // The six contractions of the nine-term Hessian (each summed over all
    // ordered tuples).
    Expr t1() const {
        Expr r;
        for (int A = 0; A < N; ++A)
            for (int B = 0; B < N; ++B) r += d00(A, B) * eta(A) * eta(B);
        return r;
    }
    Expr t2() const {
        Expr r;
        for (int A = 0; A < N; ++A)
            for (int B = 0; B < N; ++B)
                for (int mu = 0; mu < n; ++mu) r += d01(A, B, mu) * eta(A) * eta1(B, mu);
        return r;
    }
    Expr t3() const {
        Expr r;
        for (int A = 0; A < N; ++A)
            for (int B = 0; B < N; ++B)
                for (int mu = 0; mu < n; ++mu)
                    for (int nu = 0; nu < n; ++nu)
                        r += d02(A, B, mu, nu) * eta(A) * eta2(B, mu, nu);
        return r;
    }
    Expr t5() const {
        Expr r;
        for (int A = 0; A < N; ++A)
            for (int B = 0; B < N; ++B)
                for (int mu = 0; mu < n; ++mu)
                    for (int nu = 0; nu < n; ++nu)
                        r += d11(A, mu, B, nu) * eta1(A, mu) * eta1(B, nu);
        return r;
    }
    Expr t6() const {
        Expr r;
        for (int A = 0; A < N; ++A)
            for (int B = 0; B < N; ++B)
                for (int mu = 0; mu < n; ++mu)
                    for (int nu = 0; nu < n; ++nu)
                        for (int lam = 0; lam < n; ++lam)
                            r += d12(A, mu, B, nu, lam) * eta1(A, mu) * eta2(B, nu, lam);
        return r;
    }
    Expr t9() const {
        Expr r;
        for (int A = 0; A < N; ++A)
            for (int B = 0; B < N; ++B)
                for (int mu = 0; mu < n; ++mu)
                    for (int nu = 0; nu < n; ++nu)
                        for (int lam = 0; lam < n; ++lam)
                            for (int rho = 0; rho < n; ++rho)
                                r += d22(A, mu, nu, B, lam, rho) * eta2(A, mu, nu) *
                                     eta2(B, lam, rho);
        return r;
    }
};

}  // namespace detail

// One integration-by-parts decomposition of the full Hessian:
// 2*l2 = bulk + sum_mu D_mu current^mu, exactly.
inline IbpForm ibp_form(const Problem& p, IbpVariant variant) {
    using namespace detail;
    IbpContext c{p.lagrangian, p.n, p.field_count()};
    const int n = c.n, N = c.N;
    IbpForm form;
    form.variant = variant;
    form.current.components.assign(n, Expr());

    switch (variant) {
        case IbpVariant::A1: {
            // First-order part of term 4 moved onto the eta-eta slot.
            Expr bulk;
            for (int A = 0; A < N; ++A)
                for (int B = 0; B < N; ++B) {
                    Expr trunc = p0(c.L, B, 0);
                    for (int mu = 0; mu < n; ++mu)
                        trunc -= total_derivative(p1(c.L, B, 0, mu), mu);
                    bulk += p0(trunc, A, 0) * c.eta(A) * c.eta(B);
                    for (int mu = 0; mu < n; ++mu)
                        bulk += (c.d01(A, B, mu) - c.d01(B, A, mu)) * c.eta(A) * c.eta1(B, mu);
                }
            bulk += Rational(2) * c.t3() + c.t5() + Rational(2) * c.t6() + c.t9();
            form.bulk = bulk;
            for (int mu = 0; mu < n; ++mu) {
                Expr cur;
                for (int A = 0; A < N; ++A)
                    for (int B = 0; B < N; ++B) cur += c.d01(A, B, mu) * c.eta(A) * c.eta(B);
                form.current.components[mu] = cur;
            }
            break;
        }
        case IbpVariant::A2: {
            // Term 5 integrated by parts.
            Expr bulk = c.t1();
            for (int A = 0; A < N; ++A)
                for (int B = 0; B < N; ++B)
                    for (int mu = 0; mu < n; ++mu) {
                        Expr coeff = Rational(2) * c.d01(A, B, mu);
                        for (int nu = 0; nu < n; ++nu)
                            coeff -= total_derivative(c.d11(A, nu, B, mu), nu);
                        bulk += coeff * c.eta(A) * c.eta1(B, mu);
                        for (int nu = 0; nu < n; ++nu)
                            bulk += (Rational(2) * c.d02(A, B, mu, nu) - c.d11(A, mu, B, nu)) *
                                    c.eta(A) * c.eta2(B, mu, nu);
                    }
            bulk += Rational(2) * c.t6() + c.t9();
            form.bulk = bulk;
            for (int mu = 0; mu < n; ++mu) {
                Expr cur;
                for (int A = 0; A < N; ++A)
                    for (int B = 0; B < N; ++B)
                        for (int nu = 0; nu < n; ++nu)
                            cur += c.d11(A, mu, B, nu) * c.eta(A) * c.eta1(B, nu);
                form.current.components[mu] = cur;
            }
            break;
        }
        case IbpVariant::A3: {
            // Term 7 integrated by parts.
            Expr bulk = c.t1() + c.t3();
            for (int A = 0; A < N; ++A)
                for (int B = 0; B < N; ++B)
                    for (int mu = 0; mu < n; ++mu) {
                        Expr coeff = Rational(2) * c.d01(A, B, mu);
                        for (int nu = 0; nu < n; ++nu)
                            coeff -= total_derivative(c.d02(A, B, mu, nu), nu);
                        bulk += coeff * c.eta(A) * c.eta1(B, mu);
                        for (int nu = 0; nu < n; ++nu)
                            bulk += (c.d11(A, mu, B, nu) - c.d02(A, B, mu, nu)) * c.eta1(A, mu) *
                                    c.eta1(B, nu);
                    }
            bulk += Rational(2) * c.t6() + c.t9();
            form.bulk = bulk;
            for (int mu = 0; mu < n; ++mu) {
                Expr cur;
                for (int A = 0; A < N; ++A)
                    for (int B = 0; B < N; ++B)
                        for (int nu = 0; nu < n; ++nu)
                            cur += c.d02(A, B, mu, nu) * c.eta(A) * c.eta1(B, nu);
                form.current.components[mu] = cur;
            }
            break;
        }
        case IbpVariant::A4: {
            // Term 8 integrated by parts.
            Expr bulk = c.t1() + Rational(2) * c.t2() + Rational(2) * c.t3() + c.t9();
            for (int A = 0; A < N; ++A)
                for (int B = 0; B < N; ++B)
                    for (int mu = 0; mu < n; ++mu)
                        for (int nu = 0; nu < n; ++nu) {
                            Expr coeff = c.d11(A, mu, B, nu);
                            for (int lam = 0; lam < n; ++lam)
                                coeff -= total_derivative(c.d12(B, nu, A, lam, mu), lam);
                            bulk += coeff * c.eta1(A, mu) * c.eta1(B, nu);
                            for (int lam = 0; lam < n; ++lam)
                                bulk += (c.d12(A, mu, B, nu, lam) - c.d12(B, nu, A, mu, lam)) *
                                        c.eta1(A, mu) * c.eta2(B, nu, lam);
                        }
            form.bulk = bulk;
            for (int mu = 0; mu < n; ++mu) {
                Expr cur;
                for (int A = 0; A < N; ++A)
                    for (int B = 0; B < N; ++B)
                        for (int nu = 0; nu < n; ++nu)
                            for (int lam = 0; lam < n; ++lam)
                                cur += c.d12(B, lam, A, mu, nu) * c.eta1(A, nu) * c.eta1(B, lam);
                form.current.components[mu] = cur;
            }
            break;
        }
        case IbpVariant::Unified: {
            // All first-order integrations combined; the eta-eta coefficient
            // carries the full Euler-Lagrange second derivative.
            Expr bulk;
            for (int A = 0; A < N; ++A)
                for (int B = 0; B < N; ++B) {
                    bulk += p0(c.el0(B), A, 0) * c.eta(A) * c.eta(B);
                    for (int mu = 0; mu < n; ++mu)
                        bulk += (c.d01(A, B, mu) - c.d01(B, A, mu)) * c.eta(A) * c.eta1(B, mu);
                    for (int mu = 0; mu < n; ++mu)
                        for (int nu = 0; nu < n; ++nu)
                            bulk += (c.d11(A, mu, B, nu) - c.d02(A, B, mu, nu)) * c.eta1(A, mu) *
                                    c.eta1(B, nu);
                    for (int mu = 0; mu < n; ++mu)
                        for (int nu = 0; nu < n; ++nu)
                            for (int lam = 0; lam < n; ++lam)
                                bulk += (c.d12(A, mu, B, nu, lam) - c.d12(B, mu, A, nu, lam)) *
                                        c.eta1(A, mu) * c.eta2(B, nu, lam);
                }
            bulk += c.t9();
            form.bulk = bulk;
            for (int mu = 0; mu < n; ++mu) {
                Expr cur;
                for (int A = 0; A < N; ++A)
                    for (int B = 0; B < N; ++B) {
                        cur += p0(c.el1(B, mu), A, 0) * c.eta(A) * c.eta(B);
                        for (int nu = 0; nu < n; ++nu)
                            cur += c.d02(A, B, mu, nu) * c.eta(A) * c.eta1(B, nu);
                        for (int nu = 0; nu < n; ++nu)
                            for (int lam = 0; lam < n; ++lam)
                                cur += c.d12(A, nu, B, lam, mu) * c.eta1(A, nu) * c.eta1(B, lam);
                    }
                form.current.components[mu] = cur;
            }
            // For Lagrangians with genuine second-derivative dependence the
            // combined decomposition above is not exact on its own.  The
            // defect is quadratic and homogeneous in the eta family, so the
            // Euler split R = 1/2 sum_A (dR/d eta^A) eta^A + 1/2 D.V(R)
            // restores the identity: the first piece joins the bulk, the
            // second the current.  Both pieces vanish for first-order
            // Lagrangians.
            {
                Expr defect = Rational(2) * l2(p) - form.bulk;
                for (int mu = 0; mu < n; ++mu)
                    defect -= total_derivative(form.current.components[mu], mu);
                if (!defect.is_zero()) {
                    for (int A = 0; A < N; ++A)
                        form.bulk +=
                            Rational(1, 2) * euler_lagrange_expr(defect, A, 1, n) * c.eta(A);
                    for (int mu = 0; mu < n; ++mu) {
                        Expr cur;
                        for (int A = 0; A < N; ++A) {
                            cur += el_derivative_first(defect, A, 1, mu, n) * c.eta(A);
                            for (int nu = 0; nu < n; ++nu)
                                cur += p2t(defect, A, 1, mu, nu) * c.eta1(A, nu);
                        }
                        form.current.components[mu] += Rational(1, 2) * cur;
                    }
                }
            }
            break;
        }
        case IbpVariant::SelfAdjoint: {
            // bulk = J_A eta^A; the current is the boundary current of l2
            // taken with respect to the eta family, contracted with eta
            // itself.  Exactness follows from Euler homogeneity of the
            // quadratic form.
            Expr half_hessian = l2(p);
            ELResult jac = jacobi_direct(p);
            Expr bulk;
            for (int A = 0; A < N; ++A) bulk += jac.by_field[A] * c.eta(A);
            form.bulk = bulk;
            for (int mu = 0; mu < n; ++mu) {
                Expr cur;
                for (int A = 0; A < N; ++A) {
                    cur += el_derivative_first(half_hessian, A, 1, mu, n) * c.eta(A);
                    for (int nu = 0; nu < n; ++nu)
                        cur += p2t(half_hessian, A, 1, mu, nu) * c.eta1(A, nu);
                }
                form.current.components[mu] = cur;
            }
            break;
        }
    }
    return form;
}

// Divergence of a current.
inline Expr divergence(const CurrentResult& cur) {
    Expr r;
    for (size_t mu = 0; mu < cur.components.size(); ++mu)
        r += total_derivative(cur.components[mu], static_cast<int>(mu));
    return r;
}

// Decides equality modulo a total divergence: every variational derivative
// of a - b must vanish.  Returns the per-coordinate residuals as witness.
struct DivergenceEquivalence {
    bool equivalent = true;
    // (field, tier) -> residual expression
    std::map<std::pair<int, int>, Expr> residuals;
};

inline DivergenceEquivalence equivalent_mod_divergence(const Expr& a, const Expr& b) {
    Expr d = a - b;
    int n = 1, N = 1;
    std::vector<JetCoord> jets = collect_jets(d);
    std::map<std::pair<int, int>, bool> families;
    for (const JetCoord& j : jets) {
        N = std::max(N, j.field + 1);
        for (int mu : j.index.entries) n = std::max(n, mu + 1);
        families[{j.field, j.tier}] = true;
    }
    for_each_atom(d, [&](const Atom& at) {
        if (const auto* bc = std::get_if<BaseCoord>(&at)) n = std::max(n, bc->mu + 1);
    });
    DivergenceEquivalence res;
    for (const auto& [key, _] : families) {
        Expr r = euler_lagrange_expr(d, key.first, key.second, n);
        if (!r.is_zero()) res.equivalent = false;
        res.residuals[key] = std::move(r);
    }
    return res;
}

// Canonical momenta of L1 (tier-0 and tier-1 conjugates).
inline MomentaResult momenta(const Problem& p) {
    using namespace detail;
    const Expr L1 = l1(p);
    const int n = p.n, N = p.field_count();
    MomentaResult m;
    m.pi.resize(N);
    m.N.resize(N);
    m.p.resize(N);
    m.n.resize(N);
    for (int A = 0; A < N; ++A) {
        for (int mu = 0; mu < n; ++mu) {
            m.pi[A].push_back(el_derivative_first(L1, A, 0, mu, n));
            m.p[A].push_back(el_derivative_first(L1, A, 1, mu, n));
        }
        for (int mu = 0; mu < n; ++mu)
            for (int nu = mu; nu < n; ++nu) {
                m.N[A][{mu, nu}] = p2t(L1, A, 0, mu, nu);
                m.n[A][{mu, nu}] = p2t(L1, A, 1, mu, nu);
            }
    }
    return m;
}

// Canonical energy-momentum tensor of L1.
inline EMTensor energy_momentum(const Problem& p) {
    using namespace detail;
    const Expr L1 = l1(p);
    const MomentaResult m = momenta(p);
    const int n = p.n, N = p.field_count();
    EMTensor H;
    H.n = n;
    H.components.assign(n * n, Expr());
    auto sym = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
    for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu) {
            Expr h;
            for (int A = 0; A < N; ++A) {
                h += m.pi[A][mu] * Expr::jet(A, 0, {nu});
                h += m.p[A][mu] * Expr::jet(A, 1, {nu});
                for (int lam = 0; lam < n; ++lam) {
                    h += m.N[A].at(sym(mu, lam)) * Expr::jet(A, 0, {lam, nu});
                    h += m.n[A].at(sym(mu, lam)) * Expr::jet(A, 1, {lam, nu});
                }
            }
            if (mu == nu) h -= L1;
            H.at(mu, nu) = h;
        }
    return H;
}

// Hessian matrix of L1 over the (phi_mu, eta_mu) first-derivative
// coordinates.  Row/column layout: block 0 = phi, block 1 = eta; within a
// block, index = A*n + mu.  Size 2*N*n.
struct HessianMatrix {
    int dim = 0;
    std::vector<Expr> entries;  // row-major
    Expr& at(int i, int j) { return entries[i * dim + j]; }
    const Expr& at(int i, int j) const { return entries[i * dim + j]; }
};

inline HessianMatrix hessian_matrix(const Problem& p) {
    using namespace detail;
    const Expr L1 = l1(p);
    const int n = p.n, N = p.field_count();
    HessianMatrix W;
    W.dim = 2 * N * n;
    W.entries.assign(W.dim * W.dim, Expr());
    auto idx = [&](int block, int A, int mu) { return block * N * n + A * n + mu; };
    for (int A = 0; A < N; ++A)
        for (int mu = 0; mu < n; ++mu)
            for (int B = 0; B < N; ++B)
                for (int nu = 0; nu < n; ++nu) {
                    W.at(idx(0, A, mu), idx(0, B, nu)) = p1(p1(L1, A, 0, mu), B, 0, nu);
                    Expr w = p1(p1(L1, A, 0, mu), B, 1, nu);  // = W^{mu nu}_{AB}(L0)
                    W.at(idx(0, A, mu), idx(1, B, nu)) = w;
                    W.at(idx(1, A, mu), idx(0, B, nu)) = p1(p1(L1, A, 1, mu), B, 0, nu);
                    // eta-eta block vanishes: L1 is linear in eta.
                }
    return W;
}

// First-derivative Hessian of L0 itself, W^{mu nu}_{AB}(L0); layout A*n+mu.
inline HessianMatrix hessian_l0(const Problem& p) {
    using namespace detail;
    const int n = p.n, N = p.field_count();
    HessianMatrix W;
    W.dim = N * n;
    W.entries.assign(W.dim * W.dim, Expr());
    for (int A = 0; A < N; ++A)
        for (int mu = 0; mu < n; ++mu)
            for (int B = 0; B < N; ++B)
                for (int nu = 0; nu < n; ++nu)
                    W.at(A * n + mu, B * n + nu) = p1(p1(p.lagrangian, A, 0, mu), B, 0, nu);
    return W;
}

}  // namespace varjet
