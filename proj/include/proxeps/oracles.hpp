#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "proxeps/core.hpp"
#include "proxeps/rng.hpp"

namespace proxeps {

/// Closed interval on the real line.
struct Interval {
    double lo;
    double hi;
    bool contains(double v, double tol = 0) const { return v >= lo - tol && v <= hi + tol; }
};

/// Exact eps-subdifferential of the 1-D absolute value at t.
/// For t > 0 it is [max(-1, 1 - eps/t), 1], symmetric for t < 0,
/// and [-1, 1] at t = 0 for every eps >= 0.
Interval eps_subdiff_interval_abs(double t, double eps);

/// Evaluator bundle for one convex function: values, subgradients,
/// eps-subgradients, and gradient/Lipschitz data when smooth.
struct FunctionOracle {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> subgradient;
    // May be empty; eps_subgrad() then falls back to the exact subgradient.
    std::function<Vector(const Vector&, double)> eps_subgradient;
    bool is_smooth = false;
    std::function<Vector(const Vector&)> gradient;
    std::optional<double> lipschitz;

    Vector eps_subgrad(const Vector& x, double eps) const {
        if (eps > 0 && eps_subgradient) return eps_subgradient(x, eps);
        return subgradient(x);
    }
};

/// Necessary-condition sampler for u in partial_eps F(x): true iff
/// F(x') >= F(x) + <u, x'-x> - eps holds at every probe x'.
bool check_eps_subgradient(const FunctionOracle& F, const Vector& x, const Vector& u,
                           double eps, const std::vector<Vector>& probes, double tol = 1e-12);

/// Given v in partial F(x_src), returns the eps such that v in
/// partial_eps F(z): eps = F(z) - F(x_src) - <v, z - x_src>.
/// Throws if the result is negative beyond roundoff (invalid input subgradient).
double induced_eps_from_subgradient(const FunctionOracle& F, const Vector& x_src,
                                    const Vector& v, const Vector& z);

/// Exact membership test for v in partial_eps ||.||_1 (x):
/// |v_i| <= 1 for all i and sum_i (|x_i| - v_i x_i) <= eps.
bool l1_membership(const Vector& x, const Vector& v, double eps, double tol = 1e-9);

/// Running maxima of the subgradient norms seen during one solver run;
/// supplies the constant c when no user override is given.
struct SubgradNormTracker {
    double running_max_u = 0;
    double running_max_w = 0;
    double running_max_wbar = 0;

    void observe_u(const Vector& u) { running_max_u = std::max(running_max_u, norm(u)); }
    void observe_w(const Vector& w) { running_max_w = std::max(running_max_w, norm(w)); }
    void observe_wbar(const Vector& wbar) { running_max_wbar = std::max(running_max_wbar, norm(wbar)); }

    double c() const { return std::max({running_max_u, running_max_w, running_max_wbar}); }
};

// ---- concrete oracles ----

/// 1-D absolute value |t|.
FunctionOracle make_abs_oracle();

/// ||x||_1. When an Rng is supplied, eps-subgradients are sampled
/// componentwise from the per-coordinate eps_i-subdifferential intervals
/// with eps split evenly across coordinates.
FunctionOracle make_l1_oracle(std::shared_ptr<Rng> rng = nullptr);

/// f(x) = 1/2 ||Ax - b||^2 with gradient A^T(Ax - b). eps-subgradients are
/// produced as exact gradients at a nearby point, with the displacement
/// scaled so the induced eps matches the budget.
FunctionOracle make_least_squares_oracle(Matrix A, Vector b, std::shared_ptr<Rng> rng = nullptr);

/// The constant zero function (g == 0).
FunctionOracle make_zero_oracle();

/// Pointwise sum f + g (subgradient = sum of subgradients).
FunctionOracle make_sum_oracle(const FunctionOracle& f, const FunctionOracle& g);

/// Isotropic total variation tau * sum ||(grad x)_{i,j}||_2 on an
/// rows x cols image (value and a measurable-selection subgradient).
FunctionOracle make_tv_oracle(int rows, int cols, double tau);

}  // namespace proxeps
