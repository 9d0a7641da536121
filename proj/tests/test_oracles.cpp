#include <doctest.h>

#include <cmath>

#include <memory>

#include "proxeps/grid.hpp"
#include "proxeps/oracles.hpp"
#include "proxeps/rng.hpp"

using namespace proxeps;

namespace {

Vector vec(std::initializer_list<double> vals) {
    Vector v(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double x : vals) v[i++] = x;
    return v;
}

Vector scalar(double t) { return Vector::Constant(1, t); }

// Brute-force eps-subdifferential of |.| at t: scan candidate slopes and keep
// those satisfying the defining inequality at a wide probe set.
Interval brute_force_abs_interval(double t, double eps) {
    std::vector<double> probes = {-400, -100, -25, 25, 100, 400, t};
    for (double s = -4; s <= 4.0001; s += 0.02) probes.push_back(s);
    auto member = [&](double v) {
        for (double s : probes)
            if (std::abs(s) < std::abs(t) + v * (s - t) - eps - 1e-9) return false;
        return true;
    };
    double lo = 10, hi = -10;
    for (double v = -1.5; v <= 1.5001; v += 0.001) {
        if (member(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return {lo, hi};
}

}  // namespace

TEST_CASE("eps-subdifferential interval of |.|: closed forms") {
    Interval iv = eps_subdiff_interval_abs(2.0, 0.0);
    CHECK(iv.lo == doctest::Approx(1.0));
    CHECK(iv.hi == doctest::Approx(1.0));

    iv = eps_subdiff_interval_abs(2.0, 1.0);
    CHECK(iv.lo == doctest::Approx(0.5));
    CHECK(iv.hi == doctest::Approx(1.0));

    iv = eps_subdiff_interval_abs(2.0, 10.0);  // large slack saturates at [-1,1]
    CHECK(iv.lo == doctest::Approx(-1.0));
    CHECK(iv.hi == doctest::Approx(1.0));

    iv = eps_subdiff_interval_abs(-2.0, 1.0);  // mirror image
    CHECK(iv.lo == doctest::Approx(-1.0));
    CHECK(iv.hi == doctest::Approx(-0.5));

    iv = eps_subdiff_interval_abs(0.0, 0.0);
    CHECK(iv.lo == doctest::Approx(-1.0));
    CHECK(iv.hi == doctest::Approx(1.0));

    CHECK_THROWS_AS(eps_subdiff_interval_abs(1.0, -0.1), std::invalid_argument);
}

TEST_CASE("eps-subdifferential interval of |.|: brute-force agreement") {
    Rng rng(314);
    for (int i = 0; i < 60; ++i) {
        double t = rng.uniform(-3, 3);
        double eps = rng.uniform(0, 2);
        Interval iv = eps_subdiff_interval_abs(t, eps);
        Interval bf = brute_force_abs_interval(t, eps);
        CHECK(std::abs((iv.lo) - (bf.lo)) <= 0.02);
        CHECK(std::abs((iv.hi) - (bf.hi)) <= 0.02);
    }
}

TEST_CASE("interval containment helper") {
    Interval iv{-0.5, 1.0};
    CHECK(iv.contains(0.0));
    CHECK(iv.contains(-0.5));
    CHECK(iv.contains(1.0 + 1e-12, 1e-9));
    CHECK_FALSE(iv.contains(1.1));
}

TEST_CASE("check_eps_subgradient accepts valid and rejects invalid slopes") {
    FunctionOracle F = make_abs_oracle();
    std::vector<Vector> probes;
    for (double s = -5; s <= 5.0001; s += 0.25) probes.push_back(scalar(s));
    CHECK(check_eps_subgradient(F, scalar(2.0), scalar(1.0), 0.0, probes));
    CHECK(check_eps_subgradient(F, scalar(2.0), scalar(0.5), 1.0, probes));
    CHECK_FALSE(check_eps_subgradient(F, scalar(2.0), scalar(0.5), 0.1, probes));
    CHECK_FALSE(check_eps_subgradient(F, scalar(2.0), scalar(1.5), 0.5, probes));
    CHECK_THROWS_AS(check_eps_subgradient(F, scalar(0), scalar(0), 0, {}), std::invalid_argument);
}

TEST_CASE("induced eps from a subgradient at another point") {
    FunctionOracle F = make_abs_oracle();
    // v = 1 at x = 1; at z = -2: |z| - |1| - 1*(z-1) = 2 - 1 + 3 = 4
    CHECK(induced_eps_from_subgradient(F, scalar(1.0), scalar(1.0), scalar(-2.0)) ==
          doctest::Approx(4.0));
    // at z = x the induced eps is 0
    CHECK(induced_eps_from_subgradient(F, scalar(1.0), scalar(1.0), scalar(1.0)) ==
          doctest::Approx(0.0));
    // v = 2 is not a subgradient of |.| anywhere; nearby z exposes it
    CHECK_THROWS_AS(induced_eps_from_subgradient(F, scalar(1.0), scalar(2.0), scalar(1.1)),
                    std::invalid_argument);
}

TEST_CASE("exact l1 membership test") {
    CHECK(l1_membership(vec({1, -2}), vec({1, -1}), 0.0));
    CHECK(l1_membership(vec({1, -2}), vec({0, -1}), 1.0));
    CHECK_FALSE(l1_membership(vec({1, -2}), vec({0, -1}), 0.5));
    CHECK_FALSE(l1_membership(vec({1, 0}), vec({1.5, 0}), 100.0));  // |v_i| > 1
    CHECK(l1_membership(vec({0, 0}), vec({0.3, -0.7}), 0.0));
    CHECK_THROWS_AS(l1_membership(vec({1}), vec({1, 1}), 0.0), std::invalid_argument);
}

TEST_CASE("l1 oracle: values, subgradients, sampled eps-subgradients") {
    auto rng = std::make_shared<Rng>(5);
    FunctionOracle F = make_l1_oracle(rng);
    CHECK(F.value(vec({1, -2, 0})) == doctest::Approx(3.0));
    Vector g = F.subgradient(vec({1, -2, 0}));
    CHECK(g[0] == 1.0);
    CHECK(g[1] == -1.0);
    CHECK(g[2] == 0.0);

    Rng prng(6);
    for (int i = 0; i < 100; ++i) {
        int n = 1 + static_cast<int>(prng.uniform(0, 5));
        Vector x(n);
        for (int j = 0; j < n; ++j) x[j] = prng.uniform(-2, 2);
        double eps = prng.uniform(0, 1.5);
        Vector u = F.eps_subgrad(x, eps);
        CHECK(l1_membership(x, u, eps));
    }
}

TEST_CASE("l1 oracle sampling is deterministic given the seed") {
    Vector x = vec({0.5, -1.5, 2.0});
    FunctionOracle F1 = make_l1_oracle(std::make_shared<Rng>(42));
    FunctionOracle F2 = make_l1_oracle(std::make_shared<Rng>(42));
    for (int i = 0; i < 10; ++i) {
        Vector a = F1.eps_subgrad(x, 0.7);
        Vector b = F2.eps_subgrad(x, 0.7);
        CHECK((a - b).norm() == 0.0);
    }
}

TEST_CASE("least-squares oracle: value, gradient, eps budget") {
    Rng mrng(8);
    const int n = 4;
    Matrix M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = mrng.normal();
    Matrix A = M.transpose() * M;
    Vector b = Vector::Ones(n);
    FunctionOracle F = make_least_squares_oracle(A, b, std::make_shared<Rng>(9));
    CHECK(F.is_smooth);

    Vector x(n);
    for (int j = 0; j < n; ++j) x[j] = mrng.uniform(-1, 1);
    Vector r = A * x - b;
    CHECK(F.value(x) == doctest::Approx(0.5 * r.squaredNorm()));
    CHECK((F.gradient(x) - A.transpose() * r).norm() <= 1e-12);

    Rng prng(10);
    std::vector<Vector> probes;
    for (int q = 0; q < 50; ++q) {
        Vector p(n);
        for (int j = 0; j < n; ++j) p[j] = prng.uniform(-3, 3);
        probes.push_back(p);
    }
    for (int i = 0; i < 100; ++i) {
        double eps = prng.uniform(1e-6, 1.0);
        Vector u = F.eps_subgrad(x, eps);
        CHECK(check_eps_subgradient(F, x, u, eps, probes, 1e-9));
        // a generic sampled direction is not the exact gradient
        if (eps > 1e-3) CHECK((u - F.gradient(x)).norm() > 0.0);
    }
    CHECK_THROWS_AS(make_least_squares_oracle(Matrix::Identity(2, 2), Vector::Ones(3), nullptr),
                    std::invalid_argument);
}

TEST_CASE("zero and sum oracles") {
    FunctionOracle z = make_zero_oracle();
    CHECK(z.value(vec({3, 4})) == 0.0);
    CHECK(z.subgradient(vec({3, 4})).norm() == 0.0);
    CHECK(z.is_smooth);

    FunctionOracle f = make_abs_oracle();
    FunctionOracle s = make_sum_oracle(f, f);
    CHECK(s.value(scalar(-2)) == doctest::Approx(4.0));
    CHECK(s.subgradient(scalar(-2))[0] == doctest::Approx(-2.0));
}

TEST_CASE("tv oracle: values and subgradient inequality") {
    const int N = 2;
    const double tau = 0.5;
    FunctionOracle F = make_tv_oracle(N, N, tau);
    // image [[0,1],[0,1]]: horizontal differences 1 in the first column
    Vector img = vec({0, 1, 0, 1});
    CHECK(F.value(img) == doctest::Approx(2.0 * tau));
    CHECK(F.value(Vector::Constant(4, 3.0)) == doctest::Approx(0.0));
    CHECK(F.subgradient(Vector::Constant(4, 3.0)).norm() == 0.0);

    // subgradient inequality at random probe points
    Rng rng(12);
    Vector g = F.subgradient(img);
    double Fimg = F.value(img);
    for (int q = 0; q < 200; ++q) {
        Vector p(4);
        for (int j = 0; j < 4; ++j) p[j] = rng.uniform(-2, 2);
        CHECK(F.value(p) >= Fimg + inner(g, p - img) - 1e-10);
    }
}

TEST_CASE("subgradient norm tracker keeps running maxima") {
    SubgradNormTracker t;
    CHECK(t.c() == 0.0);
    t.observe_u(vec({3, 4}));
    CHECK(t.running_max_u == doctest::Approx(5.0));
    t.observe_w(vec({1, 0}));
    t.observe_wbar(vec({0, 7}));
    CHECK(t.c() == doctest::Approx(7.0));
    t.observe_u(vec({0, 1}));  // smaller, maximum unchanged
    CHECK(t.running_max_u == doctest::Approx(5.0));
}

TEST_CASE("eps_subgrad falls back to the exact subgradient") {
    FunctionOracle F = make_abs_oracle();
    F.eps_subgradient = nullptr;
    CHECK(F.eps_subgrad(scalar(2.0), 0.5)[0] == 1.0);
    CHECK(F.eps_subgrad(scalar(2.0), 0.0)[0] == 1.0);
}
