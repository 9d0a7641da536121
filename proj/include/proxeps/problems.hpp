#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "proxeps/core.hpp"
#include "proxeps/grid.hpp"
#include "proxeps/oracles.hpp"
#include "proxeps/prox.hpp"

namespace proxeps {

/// Matrix-free linear operator with adjoint.
struct LinearOperator {
    std::function<Vector(const Vector&)> apply;
    std::function<Vector(const Vector&)> adjoint;
    double operator_norm_bound = 0;  // upper bound on ||A||
};

/// High-accuracy reference solution used by telemetry and bound checks.
struct Reference {
    Vector x_star;
    double s_star = 0;
    double d0 = 0;  // ||x0 - x_star||
    bool trusted = true;
};

/// Certified inexact prox handle for g. warm (nullable) carries the inner
/// solver's state across outer iterations when warm starts are enabled.
using ProxHandle = std::function<ProxCertificate(double alpha, const Vector& y,
                                                 const ProxCriterion& crit, int max_inner,
                                                 const AccelProxContext* ctx, Vector* warm)>;

/// Assembled instance of min_{x in C} f(x) + g(x).
struct ProblemInstance {
    FunctionOracle f;
    FunctionOracle g;
    FeasibleSet C = FeasibleSet::whole_space();
    std::optional<double> L;  // Lipschitz constant of grad f when smooth
    int rows = 0, cols = 0;   // image shape; 0 when not an image problem
    std::uint64_t seed = 0;
    Vector x0;
    ProxHandle prox_g;
    std::function<Vector(double, const Vector&)> exact_prox_g;  // when available
    std::function<Vector(const Vector&)> subgrad_g;             // exact, for telemetry
    // exact subgradient of g at x chosen to minimize ||u + w|| for a given u;
    // any selection from the subdifferential is admissible, and this one keeps
    // Polyak-type steps from stalling once u + w can vanish at the optimum
    std::function<Vector(const Vector&, const Vector&)> min_residual_subgrad_g;
    MembershipTest membership_g;                                // when g admits one
    std::optional<Reference> reference;
    double objective(const Vector& x) const { return f.value(x) + g.value(x); }
};

/// l1-regularized least squares: f = 1/2||Ax-b||^2 with A = M^T M (M i.i.d.
/// standard normal from the seed), b = ones, g = ||.||_1, C the whole space,
/// x0 = ones.
ProblemInstance make_lasso(int n, std::uint64_t seed, bool with_reference = true,
                           int reference_iterations = 20000);

/// 1-D analytic instance f(x) = 1/2 (x-2)^2, g(x) = |x|, x0 = 3, with the
/// closed-form reference x* = 1, s* = 3/2.
ProblemInstance make_toy1d(std::uint64_t seed = 0);

/// Normalized truncated-Gaussian blur on N x N images with reflective
/// boundary. kernel_size = 1 is the identity.
LinearOperator gaussian_blur(int N, int kernel_size, double std_dev);

/// TV deblurring instance on a synthetic piecewise-constant N x N image:
/// b = blur(x_true) + noise, g = tau * TV, x0 = b. When image is non-null it
/// replaces the synthetic ground truth.
ProblemInstance make_tv_deblur(int N, double tau, double noise_std, std::uint64_t seed,
                               bool with_reference = false, int reference_iterations = 5000,
                               const Vector* image = nullptr);

/// Long-budget accelerated solve with the tightest available prox accuracy.
/// The reference is flagged untrusted when the value is still decreasing by
/// more than inner_tol at the end of the budget.
Reference reference_solve(const ProblemInstance& problem, int iterations, double inner_tol = 1e-12);

/// Estimate of ||A|| by power iteration on A^T A (deterministic start).
double operator_norm_estimate(const LinearOperator& op, int dim, int iterations = 200);

// Plain 8-bit P5 PGM, pixel values scaled to [0,1].
Vector read_pgm(const std::string& path, int& rows, int& cols);
void write_pgm(const std::string& path, const Vector& image, int rows, int cols);

}  // namespace proxeps
