#include "proxeps/prox.hpp"

#include <cmath>
#include <limits>

#include "proxeps/grid.hpp"

namespace proxeps {

Vector prox_l1(double alpha, const Vector& z) {
    if (!(alpha > 0)) throw std::invalid_argument("prox_l1: alpha must be positive");
    Vector x(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        double m = std::abs(z[i]) - alpha;
        x[i] = m > 0 ? (z[i] > 0 ? m : -m) : 0.0;
    }
    return x;
}

static void require_membership(const MembershipTest& membership, const Vector& x,
                               const Vector& v, double eps, const char* where) {
    if (membership && !membership(x, v, eps))
        throw InvalidCertificateError(std::string(where) + ": v is not an eps-subgradient at x");
}

CheckResult check_r_approximate(double alpha, const Vector& z, const Vector& x,
                                const Vector& v, double r, const MembershipTest& membership) {
    require_membership(membership, x, v, 0.0, "check_r_approximate");
    double residual = (alpha * v + x - z).norm();
    return {residual <= r, residual, r};
}

CheckResult check_sigma_approximate(double alpha, const Vector& z, const Vector& x,
                                    const Vector& v, double eps, double sigma,
                                    const MembershipTest& membership) {
    require_membership(membership, x, v, eps, "check_sigma_approximate");
    double lhs = (alpha * v + x - z).squaredNorm() + 2.0 * alpha * eps;
    double rhs = sigma * sigma * (x - z).squaredNorm();
    return {lhs <= rhs, lhs, rhs};
}

CheckResult check_sigma_quasi_approximate(double alpha, const Vector& z, const Vector& x,
                                          const Vector& v, double eps, double sigma,
                                          const MembershipTest& membership) {
    require_membership(membership, x, v, eps, "check_sigma_quasi_approximate");
    double lhs = (alpha * v + x - z).squaredNorm() + 2.0 * alpha * eps;
    double rhs = sigma * sigma * ((alpha * v).squaredNorm() + (x - z).squaredNorm());
    return {lhs <= rhs, lhs, rhs};
}

CheckResult check_accel_criterion(double alpha, const Vector& y, const Vector& x_tilde,
                                  const Vector& grad_f_xtilde, const Vector& x_bar,
                                  const Vector& w_bar, double eps_bar, double sigma,
                                  const MembershipTest& membership) {
    double scale = std::max(1.0, y.norm());
    if ((y - (x_tilde - alpha * grad_f_xtilde)).norm() > 1e-9 * scale)
        throw std::invalid_argument("check_accel_criterion: y != x_tilde - alpha*grad_f(x_tilde)");
    require_membership(membership, x_bar, w_bar, eps_bar, "check_accel_criterion");
    double lhs = (alpha * w_bar + x_bar - y).squaredNorm() + 2.0 * alpha * eps_bar;
    double rhs = sigma * sigma *
                 ((x_bar - x_tilde).squaredNorm() + (alpha * (w_bar + grad_f_xtilde)).squaredNorm());
    return {lhs <= rhs, lhs, rhs};
}

double r_to_e(double r, double alpha, bool use_r_squared) {
    if (!(alpha > 0)) throw std::invalid_argument("r_to_e: alpha must be positive");
    return (use_r_squared ? r * r : r) / (2.0 * alpha);
}

ProxCertificate solve_prox_absolute(
    const std::function<Vector(double, const Vector&)>& g_exact_prox,
    const std::function<Vector(const Vector&, const Vector&, double)>& wbar_select,
    double alpha, const Vector& y, double r, int samples) {
    Vector p = g_exact_prox(alpha, y);
    ProxCertificate cert;
    cert.criterion = ProxCriterion::r_absolute(r);
    int evaluated = 0;
    // farthest feasible sample first; t = 0 (the exact prox) always passes
    for (int j = 0; j < samples; ++j) {
        double t = 1.0 - static_cast<double>(j) / (samples - 1);
        Vector x_bar = p + t * (y - p);
        Vector w_bar = wbar_select(x_bar, y, alpha);
        ++evaluated;
        double residual = (alpha * w_bar + x_bar - y).norm();
        if (residual <= r) {
            cert.x_bar = std::move(x_bar);
            cert.w_bar = std::move(w_bar);
            cert.eps_bar = 0;
            cert.lhs = residual;
            cert.rhs = r;
            cert.inner_iterations = evaluated;
            return cert;
        }
    }
    throw std::logic_error("solve_prox_absolute: exact prox failed the residual check");
}

Vector l1_min_residual_subgradient(const Vector& x_bar, const Vector& y, double alpha) {
    Vector w(x_bar.size());
    for (Eigen::Index i = 0; i < x_bar.size(); ++i) {
        if (x_bar[i] > 0)
            w[i] = 1.0;
        else if (x_bar[i] < 0)
            w[i] = -1.0;
        else
            w[i] = std::clamp((y[i] - x_bar[i]) / alpha, -1.0, 1.0);
    }
    return w;
}

ProxCertificate solve_prox_l1(double alpha, const Vector& y, const ProxCriterion& crit,
                              const AccelProxContext* ctx, int samples) {
    if (crit.kind == ProxCriterion::Kind::Accel && ctx == nullptr)
        throw std::invalid_argument("solve_prox_l1: accel criterion needs its context");
    Vector p = prox_l1(alpha, y);
    double phi_p = p.lpNorm<1>() + (0.5 / alpha) * (p - y).squaredNorm();
    ProxCertificate cert;
    cert.criterion = crit;
    if (crit.param == 0 && crit.kind != ProxCriterion::Kind::Accel) {
        // a zero tolerance demands the exact prox; its optimality condition
        // gives a subgradient whose residual vanishes identically, which a
        // numerically evaluated residual cannot reproduce
        cert.x_bar = p;
        cert.w_bar = (y - p) / alpha;
        cert.eps_bar = 0;
        cert.lhs = 0;
        cert.rhs = 0;
        cert.inner_iterations = 1;
        return cert;
    }
    int evaluated = 0;
    for (int j = 0; j < samples; ++j) {
        double t = 1.0 - static_cast<double>(j) / (samples - 1);
        Vector x_bar = p + t * (y - p);
        // at t = 0 the candidate is the exact prox, whose optimality condition
        // makes (y - x_bar)/alpha a subgradient with residual exactly zero
        Vector w_bar = j == samples - 1 ? Vector((y - x_bar) / alpha)
                                        : l1_min_residual_subgradient(x_bar, y, alpha);
        ++evaluated;
        CheckResult res{false, 0, 0};
        double eps_bar = 0;
        switch (crit.kind) {
        case ProxCriterion::Kind::RAbsolute:
            res = check_r_approximate(alpha, y, x_bar, w_bar, crit.param);
            break;
        case ProxCriterion::Kind::SigmaApprox:
            res = check_sigma_approximate(alpha, y, x_bar, w_bar, 0.0, crit.param);
            break;
        case ProxCriterion::Kind::SigmaQuasi:
            res = check_sigma_quasi_approximate(alpha, y, x_bar, w_bar, 0.0, crit.param);
            break;
        case ProxCriterion::Kind::Accel:
            res = check_accel_criterion(alpha, y, ctx->x_tilde, ctx->grad_f_xtilde, x_bar,
                                        w_bar, 0.0, crit.param);
            break;
        case ProxCriterion::Kind::AbsoluteGap: {
            double gap = x_bar.lpNorm<1>() + (0.5 / alpha) * (x_bar - y).squaredNorm() - phi_p;
            eps_bar = std::max(gap, 0.0);
            res = {eps_bar <= crit.param, eps_bar, crit.param};
            break;
        }
        }
        if (res.pass) {
            cert.x_bar = std::move(x_bar);
            cert.w_bar = std::move(w_bar);
            cert.eps_bar = eps_bar;
            cert.lhs = res.lhs;
            cert.rhs = res.rhs;
            cert.inner_iterations = evaluated;
            return cert;
        }
    }
    throw std::logic_error("solve_prox_l1: exact prox failed the acceptance rule");
}

double tv_dual_gap(double alpha, const Vector& y, const Vector& v, double tau,
                   int rows, int cols) {
    const int n = rows * cols;
    if (v.size() != 2 * static_cast<Eigen::Index>(n) || y.size() != n)
        throw std::invalid_argument("tv_dual_gap: dimension mismatch");
    for (int k = 0; k < n; ++k) {
        if (std::hypot(v[k], v[n + k]) > tau * (1.0 + 1e-9) + 1e-300)
            return std::numeric_limits<double>::infinity();
    }
    Vector div = discrete_gradient_adjoint(v, rows, cols);  // grad* v
    Vector x = y - alpha * div;
    double phi = tv_value(x, rows, cols, tau) + (0.5 / alpha) * (x - y).squaredNorm();
    double psi = (0.5 / alpha) * ((alpha * div - y).squaredNorm() - y.squaredNorm());
    double gap = phi + psi;
    if (gap < 0) {
        if (gap < -1e-10) throw std::logic_error("tv_dual_gap: weak duality violated");
        gap = 0;
    }
    return gap;
}

ProxCertificate solve_prox_tv_dual(double alpha, const Vector& y, double tau,
                                   int rows, int cols, const ProxCriterion& crit,
                                   int max_inner, const AccelProxContext* ctx,
                                   Vector* warm_v) {
    if (crit.kind == ProxCriterion::Kind::RAbsolute)
        throw std::invalid_argument("solve_prox_tv_dual: absolute-residual criterion is not certifiable here");
    if (crit.kind == ProxCriterion::Kind::Accel && ctx == nullptr)
        throw std::invalid_argument("solve_prox_tv_dual: accel criterion needs its context");
    if (max_inner < 1) throw std::invalid_argument("solve_prox_tv_dual: max_inner must be >= 1");
    const int n = rows * cols;

    Vector v_best;
    if (warm_v != nullptr && warm_v->size() == 2 * static_cast<Eigen::Index>(n))
        v_best = *warm_v;
    else
        v_best = Vector::Zero(2 * n);
    project_dual_blocks(v_best, rows, cols, tau);
    double gap_best = tv_dual_gap(alpha, y, v_best, tau, rows, cols);

    // accelerated projected gradient on the dual, monotone in the gap:
    // the momentum sequence runs freely, the certified iterate is the best
    // dual point seen so far
    const double step = 1.0 / (alpha * kDiscreteGradientNormSq);
    Vector v_cur = v_best, v_prev = v_best;
    double t_acc = 1.0;
    Vector grad_y = discrete_gradient(y, rows, cols);

    ProxCertificate cert;
    cert.criterion = crit;
    auto evaluate = [&](int inner) -> bool {
        Vector w_bar = discrete_gradient_adjoint(v_best, rows, cols);
        Vector x_bar = y - alpha * w_bar;
        double eps_bar = gap_best;
        double lhs = 0, rhs = 0;
        bool pass = false;
        switch (crit.kind) {
        case ProxCriterion::Kind::SigmaApprox:
            lhs = 2.0 * alpha * eps_bar;  // residual alpha*w + x - y is identically 0
            rhs = crit.param * crit.param * (x_bar - y).squaredNorm();
            pass = lhs <= rhs;
            break;
        case ProxCriterion::Kind::SigmaQuasi:
            lhs = 2.0 * alpha * eps_bar;
            rhs = crit.param * crit.param *
                  ((alpha * w_bar).squaredNorm() + (x_bar - y).squaredNorm());
            pass = lhs <= rhs;
            break;
        case ProxCriterion::Kind::Accel:
            lhs = 2.0 * alpha * eps_bar;
            rhs = crit.param * crit.param *
                  ((x_bar - ctx->x_tilde).squaredNorm() +
                   (alpha * (w_bar + ctx->grad_f_xtilde)).squaredNorm());
            pass = lhs <= rhs;
            break;
        case ProxCriterion::Kind::AbsoluteGap:
            lhs = eps_bar;
            rhs = crit.param;
            pass = lhs <= rhs;
            break;
        default:
            break;
        }
        cert.x_bar = std::move(x_bar);
        cert.w_bar = std::move(w_bar);
        cert.eps_bar = eps_bar;
        cert.lhs = lhs;
        cert.rhs = rhs;
        cert.inner_iterations = inner;
        return pass;
    };

    for (int l = 1; l <= max_inner; ++l) {
        if (evaluate(l)) {
            if (warm_v != nullptr) *warm_v = v_best;
            return cert;
        }
        if (l == max_inner) break;
        double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_acc * t_acc));
        Vector w = v_cur + ((t_acc - 1.0) / t_next) * (v_cur - v_prev);
        // gradient of the smooth dual part at w
        Vector grad = alpha * discrete_gradient(discrete_gradient_adjoint(w, rows, cols), rows, cols) - grad_y;
        Vector z = w - step * grad;
        project_dual_blocks(z, rows, cols, tau);
        double gap_z = tv_dual_gap(alpha, y, z, tau, rows, cols);
        if (gap_z < gap_best) {
            gap_best = gap_z;
            v_best = z;
        }
        v_prev = std::move(v_cur);
        v_cur = std::move(z);
        t_acc = t_next;
    }
    cert.budget_exhausted = true;
    if (warm_v != nullptr) *warm_v = v_best;
    return cert;
}

}  // namespace proxeps
