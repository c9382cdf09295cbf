#pragma once

// Numeric evaluation.  NumericState binds atoms to doubles; unbound atoms
// are an error, never silently zero.  CompiledExpr flattens an expression
// against a fixed slot layout for fast repeated evaluation inside the
// integrators.

#include <cmath>
#include <functional>
#include <memory>
#include <map>
#include <vector>

#include "varjet/calculus.hpp"
#include "varjet/expr.hpp"
#include "varjet/format.hpp"

namespace varjet {

struct NumericState {
    std::map<Atom, double, AtomLess> values;

    void bind(const Atom& a, double v) { values[a] = v; }
    void bind_param(const std::string& name, double v) { values[Param{name}] = v; }
    void bind_base(int mu, double v) { values[BaseCoord{mu}] = v; }
    void bind_jet(const JetCoord& c, double v) { values[Atom(c)] = v; }
};

inline double evaluate(const Expr& e, const NumericState& s) {
    double total = 0.0;
    for (const Monomial& m : e.terms()) {
        double term = m.coeff.convert_to<double>();
        for (const auto& [a, k] : m.powers) {
            double v;
            if (const auto* f = std::get_if<FuncApp>(&a)) {
                double arg = evaluate(*f->arg, s);
                switch (f->fn) {
                    case Func::Sin: v = std::sin(arg); break;
                    case Func::Cos: v = std::cos(arg); break;
                    default: v = std::exp(arg); break;
                }
            } else {
                auto it = s.values.find(a);
                if (it == s.values.end())
                    throw UnboundAtomError("unbound atom '" +
                                           format_expr(Expr::atom(a), Style::Plain) + "'");
                v = it->second;
            }
            term *= std::pow(v, k);
        }
        total += term;
    }
    return total;
}

// Exact evaluation over the rationals; defined for polynomial expressions
// only (elementary functions are rejected).
inline Rational evaluate_rational(const Expr& e, const std::map<Atom, Rational, AtomLess>& vals) {
    Rational total = 0;
    for (const Monomial& m : e.terms()) {
        Rational term = m.coeff;
        for (const auto& [a, k] : m.powers) {
            if (std::holds_alternative<FuncApp>(a))
                throw UnboundAtomError("exact evaluation of elementary functions is not supported");
            auto it = vals.find(a);
            if (it == vals.end())
                throw UnboundAtomError("unbound atom '" + format_expr(Expr::atom(a), Style::Plain) +
                                       "'");
            Rational v = it->second;
            int kk = k;
            if (kk < 0) {
                if (v == 0) throw DegenerateExpressionError("zero to a negative power");
                v = Rational(1) / v;
                kk = -kk;
            }
            for (int i = 0; i < kk; ++i) term *= v;
        }
        total += term;
    }
    return total;
}

// Expression flattened against a slot layout.  index_of maps every
// non-function atom to a slot; it may throw UnboundAtomError.
class CompiledExpr {
  public:
    CompiledExpr() = default;

    CompiledExpr(const Expr& e, const std::function<int(const Atom&)>& index_of) {
        for (const Monomial& m : e.terms()) {
            Term t;
            t.coeff = m.coeff.convert_to<double>();
            for (const auto& [a, k] : m.powers) {
                if (const auto* f = std::get_if<FuncApp>(&a)) {
                    t.funcs.push_back(
                        {f->fn, std::make_shared<CompiledExpr>(*f->arg, index_of), k});
                } else {
                    t.factors.push_back({index_of(a), k});
                }
            }
            terms_.push_back(std::move(t));
        }
    }

    double eval(const std::vector<double>& slots) const {
        double total = 0.0;
        for (const Term& t : terms_) {
            double term = t.coeff;
            for (const auto& [slot, k] : t.factors) term *= ipow(slots[slot], k);
            for (const auto& f : t.funcs) {
                double arg = f.arg->eval(slots);
                double v;
                switch (f.fn) {
                    case Func::Sin: v = std::sin(arg); break;
                    case Func::Cos: v = std::cos(arg); break;
                    default: v = std::exp(arg); break;
                }
                term *= ipow(v, f.power);
            }
            total += term;
        }
        return total;
    }

  private:
    static double ipow(double base, int k) {
        if (k == 1) return base;
        return std::pow(base, k);
    }

    struct FuncFactor {
        Func fn;
        std::shared_ptr<CompiledExpr> arg;
        int power;
    };
    struct Term {
        double coeff;
        std::vector<std::pair<int, int>> factors;  // slot, exponent
        std::vector<FuncFactor> funcs;
    };
    std::vector<Term> terms_;
};

}  // namespace varjet
