#include "proxeps/oracles.hpp"

#include <cmath>

#include "proxeps/grid.hpp"

namespace proxeps {

Interval eps_subdiff_interval_abs(double t, double eps) {
    if (eps < 0) throw std::invalid_argument("eps_subdiff_interval_abs: eps must be nonnegative");
    if (t > 0) return {std::max(-1.0, 1.0 - eps / t), 1.0};
    if (t < 0) return {-1.0, std::min(1.0, -1.0 + eps / (-t))};
    return {-1.0, 1.0};
}

bool check_eps_subgradient(const FunctionOracle& F, const Vector& x, const Vector& u,
                           double eps, const std::vector<Vector>& probes, double tol) {
    if (probes.empty()) throw std::invalid_argument("check_eps_subgradient: probes must be non-empty");
    const double fx = F.value(x);
    for (const Vector& xp : probes) {
        if (F.value(xp) < fx + inner(u, xp - x) - eps - tol) return false;
    }
    return true;
}

double induced_eps_from_subgradient(const FunctionOracle& F, const Vector& x_src,
                                    const Vector& v, const Vector& z) {
    double eps = F.value(z) - F.value(x_src) - inner(v, z - x_src);
    if (eps < -1e-12)
        throw std::invalid_argument("induced_eps_from_subgradient: negative eps, v is not a subgradient at x_src");
    return std::max(eps, 0.0);
}

bool l1_membership(const Vector& x, const Vector& v, double eps, double tol) {
    require_same_dim(x, v, "l1_membership");
    double total = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::abs(v[i]) > 1.0 + tol) return false;
        total += std::abs(x[i]) - v[i] * x[i];
    }
    return total <= eps + tol;
}

FunctionOracle make_abs_oracle() {
    FunctionOracle F;
    F.value = [](const Vector& x) { return std::abs(x[0]); };
    F.subgradient = [](const Vector& x) {
        Vector g(1);
        g[0] = x[0] > 0 ? 1.0 : (x[0] < 0 ? -1.0 : 0.0);
        return g;
    };
    F.eps_subgradient = [](const Vector& x, double eps) {
        Interval iv = eps_subdiff_interval_abs(x[0], eps);
        Vector g(1);
        g[0] = 0.5 * (iv.lo + iv.hi);
        return g;
    };
    return F;
}

FunctionOracle make_l1_oracle(std::shared_ptr<Rng> rng) {
    FunctionOracle F;
    F.value = [](const Vector& x) { return x.lpNorm<1>(); };
    F.subgradient = [](const Vector& x) {
        Vector g(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i)
            g[i] = x[i] > 0 ? 1.0 : (x[i] < 0 ? -1.0 : 0.0);
        return g;
    };
    F.eps_subgradient = [rng](const Vector& x, double eps) {
        const double eps_i = eps / static_cast<double>(x.size());
        Vector g(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            Interval iv = eps_subdiff_interval_abs(x[i], eps_i);
            double t = rng ? rng->uniform() : 0.5;
            g[i] = iv.lo + t * (iv.hi - iv.lo);
        }
        return g;
    };
    return F;
}

FunctionOracle make_least_squares_oracle(Matrix A, Vector b, std::shared_ptr<Rng> rng) {
    if (A.rows() != b.size()) throw std::invalid_argument("make_least_squares_oracle: A/b shape mismatch");
    auto Ap = std::make_shared<Matrix>(std::move(A));
    auto bp = std::make_shared<Vector>(std::move(b));
    FunctionOracle F;
    F.is_smooth = true;
    F.value = [Ap, bp](const Vector& x) {
        Vector r = (*Ap) * x - *bp;
        return 0.5 * r.squaredNorm();
    };
    F.gradient = [Ap, bp](const Vector& x) { return Vector(Ap->transpose() * ((*Ap) * x - *bp)); };
    F.subgradient = F.gradient;
    F.eps_subgradient = [Ap, bp, rng](const Vector& x, double eps) -> Vector {
        Vector grad = Ap->transpose() * ((*Ap) * x - *bp);
        if (eps <= 0 || !rng) return grad;
        // gradient at z = x + rho*d is an eps'-subgradient at x with
        // eps' = rho^2/2 d^T A^T A d; scale rho so eps' == eps
        Vector d(x.size());
        for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = rng->normal();
        double dn = d.norm();
        if (dn == 0) return grad;
        d /= dn;
        double quad = ((*Ap) * d).squaredNorm();
        if (quad <= 0) return grad;
        double rho = std::sqrt(2.0 * eps / quad);
        Vector z = x + rho * d;
        return Vector(Ap->transpose() * ((*Ap) * z - *bp));
    };
    return F;
}

FunctionOracle make_zero_oracle() {
    FunctionOracle F;
    F.is_smooth = true;
    F.value = [](const Vector&) { return 0.0; };
    F.subgradient = [](const Vector& x) { return Vector(Vector::Zero(x.size())); };
    F.gradient = F.subgradient;
    F.lipschitz = 0.0;
    return F;
}

FunctionOracle make_sum_oracle(const FunctionOracle& f, const FunctionOracle& g) {
    FunctionOracle F;
    F.value = [f, g](const Vector& x) { return f.value(x) + g.value(x); };
    F.subgradient = [f, g](const Vector& x) { return Vector(f.subgradient(x) + g.subgradient(x)); };
    F.is_smooth = f.is_smooth && g.is_smooth;
    if (F.is_smooth) {
        F.gradient = F.subgradient;
        if (f.lipschitz && g.lipschitz) F.lipschitz = *f.lipschitz + *g.lipschitz;
    }
    return F;
}

FunctionOracle make_tv_oracle(int rows, int cols, double tau) {
    FunctionOracle F;
    F.value = [rows, cols, tau](const Vector& x) { return tv_value(x, rows, cols, tau); };
    F.subgradient = [rows, cols, tau](const Vector& x) {
        Vector p = discrete_gradient(x, rows, cols);
        const int n = rows * cols;
        for (int k = 0; k < n; ++k) {
            double m = std::hypot(p[k], p[n + k]);
            if (m > 0) {
                p[k] *= tau / m;
                p[n + k] *= tau / m;
            }
        }
        return discrete_gradient_adjoint(p, rows, cols);
    };
    return F;
}

}  // namespace proxeps
