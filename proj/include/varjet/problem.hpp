#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "varjet/calculus.hpp"
#include "varjet/expr.hpp"

namespace varjet {

// A variational problem: base dimension, field roster, parameter table and a
// Lagrangian over tier-0 jet coordinates of order <= 2.
struct Problem {
    std::string name;
    int n = 1;  // base dimension
    std::vector<std::string> field_names;
    std::map<std::string, std::optional<Rational>> parameters;
    Expr lagrangian;

    int field_count() const { return static_cast<int>(field_names.size()); }

    // Checks the kernel-level invariants; throws UnsupportedProblemError.
    void validate() const {
        for_each_atom(lagrangian, [&](const Atom& a) {
            if (const auto* j = std::get_if<JetCoord>(&a)) {
                if (j->tier != 0)
                    throw UnsupportedProblemError(name + ": lagrangian contains a tier-" +
                                                  std::to_string(j->tier) + " coordinate");
                if (j->field < 0 || j->field >= field_count())
                    throw UnsupportedProblemError(name + ": field id out of range");
                if (j->index.order() > 2)
                    throw UnsupportedProblemError(name + ": lagrangian jet order exceeds 2");
                for (int mu : j->index.entries)
                    if (mu < 0 || mu >= n)
                        throw UnsupportedProblemError(name + ": base index out of range");
            } else if (const auto* b = std::get_if<BaseCoord>(&a)) {
                if (b->mu < 0 || b->mu >= n)
                    throw UnsupportedProblemError(name + ": base coordinate out of range");
            }
        });
    }
};

}  // namespace varjet
