#pragma once

#include <stdexcept>
#include <string>

namespace varjet {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Division by an expression that canonicalizes to zero, or an inverse of a
// non-monomial expression.
struct DegenerateExpressionError : Error {
    using Error::Error;
};

// deform() applied to a tier-2 coordinate.
struct UnsupportedTierError : Error {
    using Error::Error;
};

// Numeric evaluation hit an atom with no binding.
struct UnboundAtomError : Error {
    using Error::Error;
};

// Singular mass matrix while reducing an Euler-Lagrange system.
struct DegeneracyError : Error {
    using Error::Error;
};

// EL system not affine in its highest derivatives, n != 1, etc.
struct UnsupportedProblemError : Error {
    using Error::Error;
};

// Conservation check requested for a Lagrangian with explicit x-dependence.
struct InapplicableError : Error {
    using Error::Error;
};

struct ParseError : Error {
    int line;
    int column;
    ParseError(int line_, int column_, const std::string& msg)
        : Error("parse error at " + std::to_string(line_) + ":" + std::to_string(column_) + ": " + msg),
          line(line_),
          column(column_) {}
};

}  // namespace varjet
