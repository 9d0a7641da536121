#pragma once

#include "proxeps/core.hpp"

namespace proxeps {

// Forward-difference discrete gradient on an rows x cols image stored
// row-major in a flat vector. The result holds the horizontal differences
// in the first rows*cols entries and the vertical differences in the
// second rows*cols entries. Neumann boundary: zero difference at the last
// column / row.
inline Vector discrete_gradient(const Vector& x, int rows, int cols) {
    if (x.size() != static_cast<Eigen::Index>(rows) * cols)
        throw std::invalid_argument("discrete_gradient: shape mismatch");
    Vector p = Vector::Zero(2 * rows * cols);
    auto idx = [cols](int i, int j) { return i * cols + j; };
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            if (j + 1 < cols) p[idx(i, j)] = x[idx(i, j + 1)] - x[idx(i, j)];
            if (i + 1 < rows) p[rows * cols + idx(i, j)] = x[idx(i + 1, j)] - x[idx(i, j)];
        }
    return p;
}

// Adjoint of discrete_gradient (negative divergence).
inline Vector discrete_gradient_adjoint(const Vector& p, int rows, int cols) {
    if (p.size() != 2 * static_cast<Eigen::Index>(rows) * cols)
        throw std::invalid_argument("discrete_gradient_adjoint: shape mismatch");
    Vector x = Vector::Zero(rows * cols);
    auto idx = [cols](int i, int j) { return i * cols + j; };
    const int n = rows * cols;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            if (j + 1 < cols) {
                double h = p[idx(i, j)];
                x[idx(i, j + 1)] += h;
                x[idx(i, j)] -= h;
            }
            if (i + 1 < rows) {
                double v = p[n + idx(i, j)];
                x[idx(i + 1, j)] += v;
                x[idx(i, j)] -= v;
            }
        }
    return x;
}

// ||grad||^2 <= 8 for the forward-difference stencil.
inline constexpr double kDiscreteGradientNormSq = 8.0;

/// Isotropic TV value tau * sum_{i,j} ||(grad x)_{i,j}||_2.
inline double tv_value(const Vector& x, int rows, int cols, double tau) {
    Vector p = discrete_gradient(x, rows, cols);
    const int n = rows * cols;
    double s = 0;
    for (int k = 0; k < n; ++k) s += std::hypot(p[k], p[n + k]);
    return tau * s;
}

/// Project every 2-vector block of a dual field onto the ball of radius tau.
inline void project_dual_blocks(Vector& v, int rows, int cols, double tau) {
    const int n = rows * cols;
    for (int k = 0; k < n; ++k) {
        double m = std::hypot(v[k], v[n + k]);
        if (m > tau) {
            double s = tau / m;
            v[k] *= s;
            v[n + k] *= s;
        }
    }
}

}  // namespace proxeps
