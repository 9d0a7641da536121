#include <doctest.h>

#include <cmath>

#include "proxeps/problems.hpp"
#include "proxeps/solvers.hpp"

using namespace proxeps;

TEST_CASE("schedule evaluation, parsing and printing") {
    Schedule z = Schedule::zero();
    CHECK(z(1) == 0.0);
    CHECK(z(100) == 0.0);
    Schedule c = Schedule::constant(0.3);
    CHECK(c(0) == 0.3);
    CHECK(c(50) == 0.3);
    Schedule p = Schedule::power(2.0, 1.0);
    CHECK(p(1) == doctest::Approx(2.0));
    CHECK(p(4) == doctest::Approx(0.5));
    CHECK(p(0) == doctest::Approx(2.0));  // clamped to k=1

    CHECK(Schedule::parse("0").kind == Schedule::Kind::Zero);
    CHECK(Schedule::parse("const:0.5").a == 0.5);
    Schedule pw = Schedule::parse("pow:1:1.5");
    CHECK(pw.a == 1.0);
    CHECK(pw.p == 1.5);
    CHECK(Schedule::parse("0.25").a == 0.25);  // bare number = constant
    CHECK_THROWS_AS(Schedule::parse("pow:1"), std::invalid_argument);
    CHECK_THROWS_AS(Schedule::parse("nonsense"), std::invalid_argument);
    CHECK(Schedule::parse(pw.str()).p == 1.5);  // round trip
}

TEST_CASE("algorithm names round trip") {
    for (auto a : {Algorithm::Pesm1, Algorithm::Pesm2, Algorithm::Accel, Algorithm::Pss,
                   Algorithm::Ipgm})
        CHECK(parse_algorithm(algorithm_name(a)) == a);
    CHECK_THROWS_AS(parse_algorithm("newton"), std::invalid_argument);
}

TEST_CASE("best_value running minimum") {
    CHECK(best_value({3, 5, 2}) == std::vector<double>{3, 3, 2});
    CHECK(best_value({5, 4, 3}) == std::vector<double>{5, 4, 3});
    CHECK(best_value({7}) == std::vector<double>{7});
    CHECK(best_value({}).empty());
}

TEST_CASE("accelerated coefficient recursion: frozen hand values") {
    // alpha = sigma2/L with sigma2 = 0.25, L = 1
    double beta = 0, t = 0;
    accel_step_coeffs(0.25, 0.25, 0.0, beta, t);
    CHECK(std::abs((beta) - (0.1875)) <= 1e-12);
    CHECK(std::abs((t) - (0.1875)) <= 1e-12);
    double beta2 = 0, t2 = 0;
    accel_step_coeffs(0.25, 0.25, t, beta2, t2);
    CHECK(std::abs((beta2) - (0.303382)) <= 1e-6);
    CHECK(std::abs((t2) - (0.490882)) <= 1e-5);
    CHECK(t2 >= 4.0 * 0.25 * 0.25 * 0.75 / 4.0);  // k=2 lower bound 0.046875

    CHECK_THROWS_AS(accel_step_coeffs(0.0, 0.25, 0.0, beta, t), std::invalid_argument);
    CHECK_THROWS_AS(accel_step_coeffs(0.25, 0.5, 0.0, beta, t), std::invalid_argument);
    CHECK_THROWS_AS(accel_step_coeffs(0.25, 0.25, -1.0, beta, t), std::invalid_argument);
}

TEST_CASE("rate bound formulas collapse as expected") {
    // synthetic records with eps = r = 0, constant alpha and gradient norms
    std::vector<IterateRecord> recs(4);
    double alpha = 0.1;
    Vector u = Vector::Constant(2, 1.0);  // ||u+w||^2 = 2 with w = 0
    for (int k = 0; k < 4; ++k) {
        recs[k].alpha_k = alpha;
        recs[k].u = u;
        recs[k].w = Vector::Zero(2);
        recs[k].w_bar = Vector::Zero(2);
    }
    double d0 = 3.0;
    double c2 = 2.0;
    for (int k = 0; k < 4; ++k) {
        double expected = (d0 * d0 + c2 * (k + 1) * alpha * alpha) / (2.0 * (k + 1) * alpha);
        CHECK(rate_bound_alg1(recs, d0, k) == doctest::Approx(expected));
        // sigma = 0 reduces the relative-error bound to the r = 0 absolute one
        CHECK(rate_bound_alg2(recs, d0, k, 0.0) == doctest::Approx(expected));
    }
    // k = 0 with r and eps present
    recs[0].r_k = 0.5;
    recs[0].eps_k = 0.2;
    double expect0 = (d0 * d0 + 2 * alpha * 0.2 + 0.25 + c2 * alpha * alpha) / (2 * alpha);
    CHECK(rate_bound_alg1(recs, d0, 0) == doctest::Approx(expect0));
    CHECK_THROWS_AS(rate_bound_alg1(recs, d0, 4), std::out_of_range);
}

TEST_CASE("accelerated rate bound values") {
    CHECK(rate_bound_accel(1.0, 1.0, 0.25, 10) ==
          doctest::Approx(2.0 / (0.0625 * 0.75 * 100)).epsilon(1e-12));
    double full = rate_bound_accel(2.0, 2.0, 0.25, 7);
    double half = rate_bound_accel(2.0, 2.0 / std::sqrt(2.0), 0.25, 7);
    CHECK(half == doctest::Approx(full / 2.0));
    CHECK_THROWS_AS(rate_bound_accel(1.0, 1.0, 0.5, 3), std::invalid_argument);
    CHECK_THROWS_AS(rate_bound_accel(1.0, 1.0, 0.25, 0), std::invalid_argument);
}

TEST_CASE("exact settings reduce both inexact methods to the exact baseline") {
    ProblemInstance prob = make_lasso(5, 1, false);
    SolverConfig base;
    base.stepsize = StepsizePolicy::diminishing(1.0 / *prob.L, 1.0);
    base.max_outer = 60;
    base.stop.tol = 1e-30;
    base.compute_lemma_slack = false;

    RunResult pss = pss_run(prob, base);

    SolverConfig c1 = base;
    c1.r_schedule = Schedule::zero();
    c1.eps_schedule = Schedule::zero();
    RunResult r1 = pesm1_run(prob, c1);

    SolverConfig c2 = base;
    c2.sigma = 0.0;
    c2.eps_schedule = Schedule::zero();
    RunResult r2 = pesm2_run(prob, c2);

    REQUIRE(r1.records.size() == pss.records.size());
    REQUIRE(r2.records.size() == pss.records.size());
    for (std::size_t k = 0; k < pss.records.size(); ++k) {
        CHECK((r1.records[k].x - pss.records[k].x).norm() <= 1e-12);
        CHECK((r2.records[k].x - pss.records[k].x).norm() <= 1e-12);
    }
    CHECK((r1.final_x - pss.final_x).norm() <= 1e-12);
    CHECK((r2.final_x - pss.final_x).norm() <= 1e-12);
}

TEST_CASE("g = 0 with a box reduces to the projected subgradient method") {
    ProblemInstance prob = make_lasso(4, 2, false);
    prob.g = make_zero_oracle();
    prob.subgrad_g = prob.g.subgradient;
    prob.membership_g = {};
    prob.exact_prox_g = [](double, const Vector& z) { return z; };
    prob.prox_g = [](double, const Vector& y, const ProxCriterion& crit, int,
                     const AccelProxContext*, Vector*) {
        ProxCertificate cert;
        cert.criterion = crit;
        cert.x_bar = y;
        cert.w_bar = Vector::Zero(y.size());
        cert.inner_iterations = 1;
        return cert;
    };
    prob.C = FeasibleSet::box(Vector::Constant(4, -0.5), Vector::Constant(4, 0.5));
    prob.x0 = Vector::Zero(4);
    prob.reference.reset();

    SolverConfig cfg;
    cfg.stepsize = StepsizePolicy::diminishing(1.0 / *prob.L, 1.0);
    cfg.max_outer = 40;
    cfg.stop.tol = 1e-30;
    RunResult rr = pesm1_run(prob, cfg);
    Vector x = prob.x0;
    for (const auto& rec : rr.records) {
        CHECK(rec.w_bar.norm() == 0.0);
        CHECK((rec.x - x).norm() <= 1e-14);
        x = prob.C.project(rec.x - rec.alpha_k * rec.u);
        CHECK(prob.C.contains(x, 1e-12));
    }
    CHECK((rr.final_x - x).norm() <= 1e-14);
}

TEST_CASE("toy problem: objective decreases toward the analytic optimum") {
    ProblemInstance prob = make_toy1d(0);
    SolverConfig cfg;
    cfg.stepsize = StepsizePolicy::diminishing(1.0, 1.0);
    cfg.r_schedule = Schedule::power(0.5, 1.0);
    // exact f-subgradients: a zero step then certifies genuine stationarity,
    // while sampled endpoint subgradients can cancel the g-step by accident
    cfg.eps_schedule = Schedule::zero();
    cfg.max_outer = 300;
    cfg.stop.tol = 1e-30;
    RunResult rr = pesm1_run(prob, cfg);
    CHECK(rr.records.back().best_val - 1.5 <= 0.05);
    CHECK(rr.records.back().best_val >= 1.5 - 1e-12);
    // best values are non-increasing by construction
    for (std::size_t k = 1; k < rr.records.size(); ++k)
        CHECK(rr.records[k].best_val <= rr.records[k - 1].best_val + 1e-15);
}

TEST_CASE("a fixed point under the known-optimum Polyak step stops immediately") {
    ProblemInstance prob = make_toy1d(0);
    prob.x0 = prob.reference->x_star;  // start at the optimum
    SolverConfig cfg;
    cfg.sigma = 0.3;
    cfg.stepsize = StepsizePolicy::polyak_exact(prob.reference->s_star, 1.0);
    cfg.max_outer = 50;
    RunResult rr = pesm2_run(prob, cfg);
    CHECK(rr.stop_reason == StopReason::Converged);
    CHECK(rr.records.size() == 1);
    CHECK((rr.final_x - prob.x0).norm() == 0.0);
}

TEST_CASE("per-step inequality slack is recorded and nonnegative on exact runs") {
    ProblemInstance prob = make_lasso(5, 3, true, 20000);
    SolverConfig cfg;
    cfg.stepsize = StepsizePolicy::diminishing(1.0 / *prob.L, 1.0);
    cfg.max_outer = 80;
    cfg.stop.tol = 1e-30;
    RunResult rr = pss_run(prob, cfg);
    double scale = std::max(1.0, prob.reference->d0 * prob.reference->d0);
    for (const auto& rec : rr.records) CHECK(rec.lemma_slack >= -1e-9 * scale);

    // the feasible choice x_ref = x^k gives nonnegative slack too
    for (std::size_t k = 0; k + 1 < rr.records.size(); ++k) {
        double slack = verify_descent_lemma(rr.records[k], rr.records[k + 1].x, rr.records[k].x,
                                            rr.records[k].func_val, Algorithm::Pss, 0.0);
        CHECK(slack >= -1e-9 * scale);
    }
}

TEST_CASE("accelerated run maintains its trace invariants") {
    ProblemInstance prob = make_lasso(5, 1, true, 20000);
    SolverConfig cfg;
    cfg.sigma2 = 0.25;
    cfg.max_outer = 60;
    cfg.stop.tol = 1e-30;
    RunResult rr = accel_run(prob, cfg);
    REQUIRE(rr.accel.has_value());
    const AccelTrace& tr = *rr.accel;
    REQUIRE(tr.iters.size() == rr.records.size());
    CHECK(tr.alpha == doctest::Approx(0.25 / *prob.L));

    double t_prev = 0;
    Vector slope_sum = Vector::Zero(5);
    for (std::size_t i = 0; i < tr.iters.size(); ++i) {
        const AccelIter& it = tr.iters[i];
        CHECK(std::abs((it.t) - (t_prev + it.beta)) <= 1e-12);
        CHECK(it.beta > 0);
        slope_sum += it.beta * it.slope;
        CHECK((it.x_point - (tr.x0 - slope_sum)).norm() <= 1e-9 * (1 + slope_sum.norm()));
        // eta equals the regularized model evaluated at its argmin
        double model = tr.weighted_model_at(it.x_point, static_cast<int>(i) + 1) +
                       0.5 * (it.x_point - tr.x0).squaredNorm();
        CHECK(it.eta == doctest::Approx(model).epsilon(1e-9));
        t_prev = it.t;
    }
    CHECK_THROWS_AS(tr.weighted_model_at(tr.x0, 0), std::out_of_range);
}

TEST_CASE("ipgm: loose gap levels accept immediately, tight ones solve the prox") {
    ProblemInstance prob = make_lasso(5, 2, false);
    SolverConfig cfg;
    cfg.stepsize = StepsizePolicy::constant(1.0 / *prob.L);
    cfg.e_schedule = Schedule::constant(1e9);
    cfg.max_outer = 20;
    cfg.stop.tol = 1e-30;
    RunResult loose = ipgm_run(prob, cfg);
    for (const auto& rec : loose.records) CHECK(rec.inner_iterations == 1);

    cfg.e_schedule = Schedule::zero();
    RunResult tight = ipgm_run(prob, cfg);
    // exact prox means the classical proximal gradient method: monotone values
    for (std::size_t k = 1; k < tight.records.size(); ++k)
        CHECK(tight.records[k].func_val <= tight.records[k - 1].func_val + 1e-12);
}

TEST_CASE("ipgm extrapolation accelerates the exact method") {
    ProblemInstance prob = make_lasso(20, 5, true, 30000);
    SolverConfig cfg;
    cfg.stepsize = StepsizePolicy::constant(1.0 / *prob.L);
    cfg.e_schedule = Schedule::zero();
    cfg.max_outer = 150;
    cfg.stop.tol = 1e-30;
    RunResult plain = ipgm_run(prob, cfg);
    cfg.ipgm_extrapolation = true;
    RunResult accel = ipgm_run(prob, cfg);
    double s = prob.reference->s_star;
    CHECK(accel.records.back().best_val - s <= plain.records.back().best_val - s + 1e-12);
}

TEST_CASE("solver config validation") {
    SolverConfig cfg;
    cfg.max_outer = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.algo = Algorithm::Pesm2;
    cfg.sigma = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.algo = Algorithm::Accel;
    cfg.sigma2 = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.stop.tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("run_solver dispatches on the configured algorithm") {
    ProblemInstance prob = make_lasso(3, 6, false);
    SolverConfig cfg;
    cfg.stepsize = StepsizePolicy::diminishing(1.0 / *prob.L, 1.0);
    cfg.max_outer = 10;
    cfg.stop.tol = 1e-30;
    for (auto algo : {Algorithm::Pesm1, Algorithm::Pesm2, Algorithm::Pss, Algorithm::Ipgm}) {
        cfg.algo = algo;
        RunResult rr = run_solver(prob, cfg);
        CHECK(rr.records.size() == 10);
    }
    cfg.algo = Algorithm::Accel;
    RunResult rr = run_solver(prob, cfg);
    CHECK(rr.accel.has_value());
}
