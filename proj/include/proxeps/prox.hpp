#pragma once

#include <functional>
#include <optional>

#include "proxeps/core.hpp"
#include "proxeps/oracles.hpp"

namespace proxeps {

/// Raised when a caller-supplied (x, v, eps) fails its membership test.
struct InvalidCertificateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Acceptance rule for an inexact prox triplet.
struct ProxCriterion {
    enum class Kind { RAbsolute, SigmaApprox, SigmaQuasi, Accel, AbsoluteGap };
    Kind kind;
    double param;  // r, sigma, sigma, sigma, or e

    static ProxCriterion r_absolute(double r) { return {Kind::RAbsolute, r}; }
    static ProxCriterion sigma_approx(double sigma) { return {Kind::SigmaApprox, sigma}; }
    static ProxCriterion sigma_quasi(double sigma) { return {Kind::SigmaQuasi, sigma}; }
    static ProxCriterion accel(double sigma) { return {Kind::Accel, sigma}; }
    static ProxCriterion absolute_gap(double e) { return {Kind::AbsoluteGap, e}; }
};

/// Extra data needed to evaluate the accelerated method's acceptance rule.
struct AccelProxContext {
    Vector x_tilde;
    Vector grad_f_xtilde;
};

/// Certified inexact prox triplet (x_bar, w_bar, eps_bar) together with the
/// two sides of the inequality that accepted it.
struct ProxCertificate {
    Vector x_bar;
    Vector w_bar;
    double eps_bar = 0;
    ProxCriterion criterion{ProxCriterion::Kind::RAbsolute, 0};
    double lhs = 0;
    double rhs = 0;
    int inner_iterations = 0;
    bool budget_exhausted = false;
};

struct CheckResult {
    bool pass;
    double lhs;
    double rhs;
};

/// Optional membership test v in partial_eps g(x); empty means caller-certified.
using MembershipTest = std::function<bool(const Vector& x, const Vector& v, double eps)>;

/// Componentwise soft threshold: prox of alpha*||.||_1 at z.
Vector prox_l1(double alpha, const Vector& z);

/// Absolute criterion of the summable-error method:
/// residual ||alpha v + x - z|| <= r, with v in partial g(x).
CheckResult check_r_approximate(double alpha, const Vector& z, const Vector& x,
                                const Vector& v, double r,
                                const MembershipTest& membership = {});

/// Relative criterion ||alpha v + x - z||^2 + 2 alpha eps <= sigma^2 ||x - z||^2.
CheckResult check_sigma_approximate(double alpha, const Vector& z, const Vector& x,
                                    const Vector& v, double eps, double sigma,
                                    const MembershipTest& membership = {});

/// Quasi variant: rhs = sigma^2 (||alpha v||^2 + ||x - z||^2).
CheckResult check_sigma_quasi_approximate(double alpha, const Vector& z, const Vector& x,
                                          const Vector& v, double eps, double sigma,
                                          const MembershipTest& membership = {});

/// Acceptance rule of the accelerated method:
/// ||alpha w + x - y||^2 + 2 alpha eps <= sigma^2 (||x - xt||^2 + ||alpha(w + grad)||^2),
/// with the precondition y == x_tilde - alpha * grad_f_xtilde.
CheckResult check_accel_criterion(double alpha, const Vector& y, const Vector& x_tilde,
                                  const Vector& grad_f_xtilde, const Vector& x_bar,
                                  const Vector& w_bar, double eps_bar, double sigma,
                                  const MembershipTest& membership = {});

/// e-optimality level implied by an r-approximate solution: e = r / (2 alpha).
/// use_r_squared switches to r^2 / (2 alpha).
double r_to_e(double r, double alpha, bool use_r_squared = false);

/// Line-search inexact prox for a g with computable exact prox: samples the
/// segment [prox(y), y] and returns the farthest point whose residual check
/// passes, with w_bar in partial g(x_bar) chosen to minimize the residual.
ProxCertificate solve_prox_absolute(
    const std::function<Vector(double, const Vector&)>& g_exact_prox,
    const std::function<Vector(const Vector& x_bar, const Vector& y, double alpha)>& wbar_select,
    double alpha, const Vector& y, double r, int samples = 32);

/// Residual-minimizing exact subgradient of ||.||_1 at x_bar for target y.
Vector l1_min_residual_subgradient(const Vector& x_bar, const Vector& y, double alpha);

/// Inexact prox of alpha*||.||_1 under any of the acceptance rules, by
/// line search on [prox(y), y] with exact subgradients (eps_bar = 0 except
/// for AbsoluteGap, which reports the proximal objective gap).
ProxCertificate solve_prox_l1(double alpha, const Vector& y, const ProxCriterion& crit,
                              const AccelProxContext* ctx = nullptr, int samples = 32);

/// Duality gap G(y - alpha grad* v, v) of the TV prox subproblem; +inf when
/// some dual block lies outside the tau-ball. Values within -1e-10 of zero
/// are clamped to 0.
double tv_dual_gap(double alpha, const Vector& y, const Vector& v, double tau,
                   int rows, int cols);

/// Certified inexact TV prox: monotone accelerated projected-gradient ascent
/// on the dual, returning the first triplet that passes the criterion or the
/// last one with budget_exhausted set. warm_v, when non-null, seeds and
/// receives the dual variable.
ProxCertificate solve_prox_tv_dual(double alpha, const Vector& y, double tau,
                                   int rows, int cols, const ProxCriterion& crit,
                                   int max_inner, const AccelProxContext* ctx = nullptr,
                                   Vector* warm_v = nullptr);

}  // namespace proxeps
