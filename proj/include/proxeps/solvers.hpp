#pragma once

#include <optional>
#include <string>
#include <vector>

#include "proxeps/problems.hpp"
#include "proxeps/stepsize.hpp"

namespace proxeps {

/// Scalar schedule indexed by the outer iteration (0-based internally,
/// 1-based in the a/k^p rule).
struct Schedule {
    enum class Kind { Zero, Constant, Power };
    Kind kind = Kind::Zero;
    double a = 0;
    double p = 1;

    double operator()(int k) const;

    static Schedule zero() { return {}; }
    static Schedule constant(double v) { return {Kind::Constant, v, 0}; }
    static Schedule power(double a, double p) { return {Kind::Power, a, p}; }

    /// "0" | "const:V" | "pow:A:P" (meaning A / k^P).
    static Schedule parse(const std::string& spec);
    std::string str() const;
};

struct StoppingRule {
    enum class Kind { SquaredStep, RelativeDiff };
    Kind kind = Kind::SquaredStep;
    double tol = 1e-4;
};

enum class Algorithm { Pesm1, Pesm2, Accel, Pss, Ipgm };

Algorithm parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm a);

struct SolverConfig {
    Algorithm algo = Algorithm::Pesm1;
    StepsizePolicy stepsize = StepsizePolicy::constant(1.0);
    Schedule r_schedule;     // absolute-error method
    Schedule eps_schedule;   // eps_k budget for f's eps-subgradients
    Schedule e_schedule;     // IPGM gap levels e_k
    double sigma = 0;        // relative-error method, in [0,1)
    double sigma2 = 0.25;    // accelerated method, sigma^2 in [0,1/2)
    int max_outer = 1000;
    int max_inner = 3000;
    StoppingRule stop;
    double c_override = 0;        // Polyak sigma-term constant; 0 = tracker value
    bool ipgm_extrapolation = false;  // (k-1)/(k+2) momentum instead of beta_k = 0
    bool warm_start = false;          // reuse inner dual state across outer iterations
    bool compute_lemma_slack = true;  // needs problem.reference

    void validate() const;
};

/// Full per-iteration telemetry.
struct IterateRecord {
    int k = 0;
    Vector x;      // iterate the step starts from (x_bar for the accelerated method)
    Vector y;
    Vector u;      // eps_k-subgradient of f (gradient when smooth)
    Vector w;      // exact subgradient of g at x, telemetry only
    Vector w_bar;
    double eps_k = 0;
    double eps_bar_k = 0;
    double alpha_k = 0;
    double r_k = 0;
    double func_val = 0;
    double best_val = 0;
    double lemma_slack = 0;   // RHS - LHS of the governing inequality; NaN when skipped
    double residual_lhs = 0;  // accepted certificate inequality
    double residual_rhs = 0;
    double rel_diff = 0;
    int inner_iterations = 0;
    bool flagged = false;
    double elapsed_ms = 0;
};

/// Per-iteration state of the accelerated method, with the data needed to
/// evaluate the accumulated affine model at any point.
struct AccelIter {
    double beta = 0;
    double t = 0;
    double eta = 0;
    double F_xbar = 0;
    double eps_k = 0;    // induced eps of grad f(x_tilde) at x_bar
    double eps_bar = 0;
    Vector x_tilde;
    Vector x_bar;
    Vector x_point;      // running argmin of the regularized model
    Vector slope;        // w_bar + grad f(x_tilde)
    double intercept = 0;  // F(x_bar) - <slope, x_bar> - eps_bar - eps_k
};

struct AccelTrace {
    double alpha = 0;
    double sigma2 = 0;
    Vector x0;
    std::vector<AccelIter> iters;

    /// t_k * model_k evaluated at x (sum_{i<=k} beta_i * ell_i(x)).
    double weighted_model_at(const Vector& x, int k) const;
};

enum class StopReason { Horizon, Rule, Converged };

struct RunResult {
    std::vector<IterateRecord> records;
    Vector final_x;
    SubgradNormTracker tracker;
    long long total_inner = 0;
    int flagged_count = 0;
    double solve_seconds = 0;
    StopReason stop_reason = StopReason::Horizon;
    std::optional<AccelTrace> accel;
};

RunResult pesm1_run(const ProblemInstance& problem, const SolverConfig& config);
RunResult pesm2_run(const ProblemInstance& problem, const SolverConfig& config);
RunResult accel_run(const ProblemInstance& problem, const SolverConfig& config);
RunResult ipgm_run(const ProblemInstance& problem, const SolverConfig& config);
/// Exact proximal subgradient baseline (exact subgradients, exact prox).
RunResult pss_run(const ProblemInstance& problem, const SolverConfig& config);

RunResult run_solver(const ProblemInstance& problem, const SolverConfig& config);

/// Running minimum, first-seen index retained.
std::vector<double> best_value(const std::vector<double>& values);

/// Right-hand side of the absolute-error method's best-value bound at k.
double rate_bound_alg1(const std::vector<IterateRecord>& records, double d0, int k);

/// Right-hand side of the relative-error method's best-value bound at k.
double rate_bound_alg2(const std::vector<IterateRecord>& records, double d0, int k, double sigma);

/// 2 L d0^2 / (sigma^4 (1 - sigma^2) k^2), the accelerated value bound.
double rate_bound_accel(double L, double d0, double sigma2, int k);

/// Slack (RHS - LHS) of the per-iteration distance inequality at one
/// recorded step against a feasible reference point.
double verify_descent_lemma(const IterateRecord& rec, const Vector& x_next,
                            const Vector& x_ref, double F_ref, Algorithm algo,
                            double sigma);

/// One step of the accelerated coefficient recursion.
void accel_step_coeffs(double alpha, double sigma2, double t_prev, double& beta, double& t);

}  // namespace proxeps
