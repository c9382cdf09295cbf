#pragma once

// Small dense matrices: double LU solve with partial pivoting for the ODE
// mass matrices, and exact rational determinants for regularity sampling.

#include <cmath>
#include <vector>

#include "varjet/error.hpp"
#include "varjet/expr.hpp"

namespace varjet {

template <typename T>
class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    T& at(int r, int c) { return data_[r * cols_ + c]; }
    const T& at(int r, int c) const { return data_[r * cols_ + c]; }

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

// Solves A x = b in place with partial pivoting.  Pivots below the threshold
// raise DegeneracyError.
inline std::vector<double> lu_solve(Matrix<double> a, std::vector<double> b,
                                    double pivot_threshold = 1e-12) {
    const int n = a.rows();
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int r = k + 1; r < n; ++r)
            if (std::fabs(a.at(r, k)) > std::fabs(a.at(piv, k))) piv = r;
        if (std::fabs(a.at(piv, k)) < pivot_threshold)
            throw DegeneracyError("singular mass matrix (pivot " +
                                  std::to_string(a.at(piv, k)) + " at column " +
                                  std::to_string(k) + ")");
        if (piv != k) {
            for (int c = 0; c < n; ++c) std::swap(a.at(k, c), a.at(piv, c));
            std::swap(b[k], b[piv]);
        }
        for (int r = k + 1; r < n; ++r) {
            double f = a.at(r, k) / a.at(k, k);
            for (int c = k; c < n; ++c) a.at(r, c) -= f * a.at(k, c);
            b[r] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a.at(r, c) * x[c];
        x[r] = s / a.at(r, r);
    }
    return x;
}

// Exact determinant by fraction-free-enough Gaussian elimination over the
// rationals.
inline Rational determinant(Matrix<Rational> a) {
    const int n = a.rows();
    Rational det = 1;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        while (piv < n && a.at(piv, k) == 0) ++piv;
        if (piv == n) return Rational(0);
        if (piv != k) {
            for (int c = 0; c < n; ++c) std::swap(a.at(k, c), a.at(piv, c));
            det = -det;
        }
        det *= a.at(k, k);
        for (int r = k + 1; r < n; ++r) {
            Rational f = a.at(r, k) / a.at(k, k);
            for (int c = k; c < n; ++c) a.at(r, c) -= f * a.at(k, c);
        }
    }
    return det;
}

}  // namespace varjet
