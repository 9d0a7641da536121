#include "proxeps/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace proxeps {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ms_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

double rel_diff_value(double best, const std::optional<Reference>& ref) {
    if (!ref) return kNaN;
    return (best - ref->s_star) / std::max(std::abs(ref->s_star), 1e-16);
}

}  // namespace

double Schedule::operator()(int k) const {
    switch (kind) {
    case Kind::Zero:
        return 0.0;
    case Kind::Constant:
        return a;
    case Kind::Power:
        return a / std::pow(static_cast<double>(std::max(k, 1)), p);
    }
    throw std::logic_error("Schedule: unreachable");
}

Schedule Schedule::parse(const std::string& spec) {
    if (spec == "0" || spec == "zero") return zero();
    if (spec.rfind("const:", 0) == 0) return constant(std::stod(spec.substr(6)));
    if (spec.rfind("pow:", 0) == 0) {
        std::string rest = spec.substr(4);
        auto colon = rest.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("Schedule::parse: expected pow:A:P, got '" + spec + "'");
        return power(std::stod(rest.substr(0, colon)), std::stod(rest.substr(colon + 1)));
    }
    // bare number means a constant schedule
    try {
        std::size_t used = 0;
        double v = std::stod(spec, &used);
        if (used == spec.size()) return constant(v);
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("Schedule::parse: unrecognized schedule '" + spec + "'");
}

std::string Schedule::str() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::Zero:
        return "0";
    case Kind::Constant:
        os << "const:" << a;
        return os.str();
    case Kind::Power:
        os << "pow:" << a << ":" << p;
        return os.str();
    }
    throw std::logic_error("Schedule: unreachable");
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "pesm1") return Algorithm::Pesm1;
    if (name == "pesm2") return Algorithm::Pesm2;
    if (name == "accel") return Algorithm::Accel;
    if (name == "pss") return Algorithm::Pss;
    if (name == "ipgm") return Algorithm::Ipgm;
    throw std::invalid_argument("unknown algorithm '" + name + "'");
}

std::string algorithm_name(Algorithm a) {
    switch (a) {
    case Algorithm::Pesm1: return "pesm1";
    case Algorithm::Pesm2: return "pesm2";
    case Algorithm::Accel: return "accel";
    case Algorithm::Pss: return "pss";
    case Algorithm::Ipgm: return "ipgm";
    }
    throw std::logic_error("algorithm_name: unreachable");
}

void SolverConfig::validate() const {
    stepsize.validate();
    if (max_outer < 1) throw std::invalid_argument("SolverConfig: max_outer must be >= 1");
    if (max_inner < 1) throw std::invalid_argument("SolverConfig: max_inner must be >= 1");
    if (!(stop.tol > 0)) throw std::invalid_argument("SolverConfig: stopping tolerance must be positive");
    if (algo == Algorithm::Pesm2 && !(sigma >= 0 && sigma < 1))
        throw std::invalid_argument("SolverConfig: sigma must lie in [0,1)");
    if (algo == Algorithm::Accel && !(sigma2 > 0 && sigma2 < 0.5))
        throw std::invalid_argument("SolverConfig: sigma2 must lie in (0,1/2)");
}

void accel_step_coeffs(double alpha, double sigma2, double t_prev, double& beta, double& t) {
    if (!(alpha > 0)) throw std::invalid_argument("accel_step_coeffs: alpha must be positive");
    if (!(sigma2 > 0 && sigma2 < 0.5))
        throw std::invalid_argument("accel_step_coeffs: sigma2 must lie in (0,1/2)");
    if (t_prev < 0) throw std::invalid_argument("accel_step_coeffs: t_prev must be >= 0");
    const double a1 = alpha * (1.0 - sigma2);
    beta = 0.5 * (a1 + std::sqrt(a1 * a1 + 4.0 * a1 * t_prev));
    t = t_prev + beta;
}

double AccelTrace::weighted_model_at(const Vector& x, int k) const {
    if (k < 1 || k > static_cast<int>(iters.size()))
        throw std::out_of_range("AccelTrace::weighted_model_at: k out of range");
    double s = 0;
    for (int i = 0; i < k; ++i)
        s += iters[i].beta * (iters[i].intercept + inner(iters[i].slope, x));
    return s;
}

std::vector<double> best_value(const std::vector<double>& values) {
    std::vector<double> best(values.size());
    double cur = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
        cur = std::min(cur, values[i]);
        best[i] = cur;
    }
    return best;
}

double verify_descent_lemma(const IterateRecord& rec, const Vector& x_next,
                            const Vector& x_ref, double F_ref, Algorithm algo,
                            double sigma) {
    const double a = rec.alpha_k;
    double lhs = (x_next - x_ref).squaredNorm();
    double rhs = (rec.x - x_ref).squaredNorm() +
                 2.0 * a * (F_ref - rec.func_val + rec.eps_k) +
                 a * a * (rec.u + rec.w).squaredNorm();
    switch (algo) {
    case Algorithm::Pesm1:
    case Algorithm::Pss:
        rhs += rec.r_k * rec.r_k;
        break;
    case Algorithm::Pesm2: {
        double fac = sigma * sigma / ((1.0 - sigma) * (1.0 - sigma));
        rhs += fac * a * a * rec.w_bar.squaredNorm();
        break;
    }
    default:
        throw std::invalid_argument("verify_descent_lemma: no per-step inequality for this method");
    }
    return rhs - lhs;
}

double rate_bound_alg1(const std::vector<IterateRecord>& records, double d0, int k) {
    if (k < 0 || k >= static_cast<int>(records.size()))
        throw std::out_of_range("rate_bound_alg1: k out of range");
    double sum_a = 0, sum_ae = 0, sum_a2 = 0, sum_r2 = 0, c = 0;
    for (int j = 0; j <= k; ++j) {
        const auto& r = records[j];
        sum_a += r.alpha_k;
        sum_ae += r.alpha_k * r.eps_k;
        sum_a2 += r.alpha_k * r.alpha_k;
        sum_r2 += r.r_k * r.r_k;
        c = std::max(c, (r.u + r.w).squaredNorm());
    }
    if (!(sum_a > 0)) throw std::invalid_argument("rate_bound_alg1: zero stepsize sum");
    return (d0 * d0 + 2.0 * sum_ae + sum_r2 + c * sum_a2) / (2.0 * sum_a);
}

double rate_bound_alg2(const std::vector<IterateRecord>& records, double d0, int k, double sigma) {
    if (k < 0 || k >= static_cast<int>(records.size()))
        throw std::out_of_range("rate_bound_alg2: k out of range");
    const double fac = sigma * sigma / ((1.0 - sigma) * (1.0 - sigma));
    double sum_a = 0, sum_ae = 0, sum_a2 = 0, c = 0;
    for (int j = 0; j <= k; ++j) {
        const auto& r = records[j];
        sum_a += r.alpha_k;
        sum_ae += r.alpha_k * r.eps_k;
        sum_a2 += r.alpha_k * r.alpha_k;
        c = std::max(c, fac * r.w_bar.squaredNorm() + (r.u + r.w).squaredNorm());
    }
    if (!(sum_a > 0)) throw std::invalid_argument("rate_bound_alg2: zero stepsize sum");
    return (d0 * d0 + 2.0 * sum_ae + c * sum_a2) / (2.0 * sum_a);
}

double rate_bound_accel(double L, double d0, double sigma2, int k) {
    if (!(sigma2 > 0 && sigma2 < 0.5))
        throw std::invalid_argument("rate_bound_accel: sigma2 must lie in (0,1/2)");
    if (k < 1) throw std::invalid_argument("rate_bound_accel: k must be >= 1");
    return 2.0 * L * d0 * d0 /
           (sigma2 * sigma2 * (1.0 - sigma2) * static_cast<double>(k) * static_cast<double>(k));
}

namespace {

/// Shared loop for the two inexact methods and the exact baseline.
RunResult subgradient_loop(const ProblemInstance& P, const SolverConfig& cfg) {
    cfg.validate();
    const Algorithm algo = cfg.algo;
    const auto t0 = std::chrono::steady_clock::now();

    RunResult out;
    Vector x = P.x0;
    const bool has_ref = P.reference.has_value();
    const Vector x_star = has_ref ? P.reference->x_star : Vector();
    const double s_star = has_ref ? P.reference->s_star : kNaN;

    EstimateSequence estimates;
    double s_cur = cfg.stepsize.s0;
    const auto sk = cfg.stepsize.kind;
    const bool polyak_estimate =
        sk == StepsizePolicy::Kind::PolyakAlg1 || sk == StepsizePolicy::Kind::PolyakAlg2;
    if (polyak_estimate) estimates.push(s_cur);
    const double gamma = 0.5 * (cfg.stepsize.gamma_lo + cfg.stepsize.gamma_hi);

    Vector warm;
    double best = std::numeric_limits<double>::infinity();

    for (int k = 0; k < cfg.max_outer; ++k) {
        IterateRecord rec;
        rec.k = k;
        rec.x = x;
        rec.func_val = P.objective(x);
        best = std::min(best, rec.func_val);
        rec.best_val = best;
        rec.eps_k = algo == Algorithm::Pss ? 0.0 : cfg.eps_schedule(k + 1);

        Vector u = algo == Algorithm::Pss
                       ? (P.f.is_smooth ? P.f.gradient(x) : P.f.subgradient(x))
                       : P.f.eps_subgrad(x, rec.eps_k);
        Vector w = P.min_residual_subgrad_g
                       ? P.min_residual_subgrad_g(x, u)
                       : (P.subgrad_g ? P.subgrad_g(x) : P.g.subgradient(x));
        out.tracker.observe_u(u);
        out.tracker.observe_w(w);
        const double upw = (u + w).squaredNorm();

        double alpha = 0;
        bool converged = false;
        switch (sk) {
        case StepsizePolicy::Kind::Constant:
            alpha = cfg.stepsize.alpha;
            break;
        case StepsizePolicy::Kind::Diminishing:
            alpha = step_diminishing(cfg.stepsize.alpha0, cfg.stepsize.exponent, k + 1);
            break;
        case StepsizePolicy::Kind::PolyakExact: {
            double denom = upw;
            if (algo == Algorithm::Pesm2) {
                double c = cfg.c_override > 0 ? cfg.c_override : out.tracker.c();
                denom += cfg.sigma * cfg.sigma * c * c /
                         ((1.0 - cfg.sigma) * (1.0 - cfg.sigma));
            }
            try {
                alpha = step_polyak_exact(gamma, rec.func_val, cfg.stepsize.s_star, denom);
            } catch (const StationaritySignal&) {
                converged = true;
            }
            if (alpha == 0) converged = true;
            break;
        }
        case StepsizePolicy::Kind::PolyakAlg1:
        case StepsizePolicy::Kind::PolyakAlg2: {
            double c = cfg.c_override > 0 ? cfg.c_override : out.tracker.c();
            for (int attempt = 0; attempt < 64; ++attempt) {
                try {
                    if (sk == StepsizePolicy::Kind::PolyakAlg2)
                        alpha = step_polyak_alg2(gamma, rec.func_val, s_cur, rec.eps_k, upw,
                                                 cfg.sigma, c);
                    else
                        alpha = step_polyak_alg1(gamma, rec.func_val, s_cur, rec.eps_k, upw);
                    break;
                } catch (const EstimateViolation&) {
                    double floor = rec.func_val - rec.eps_k;
                    s_cur = floor - std::max(1e-12, cfg.stepsize.s_decrease * (s_cur - floor));
                    estimates.push(s_cur);
                } catch (const StationaritySignal&) {
                    converged = true;
                    break;
                }
            }
            if (!converged && alpha == 0)
                throw std::runtime_error("subgradient_loop: Polyak estimate never produced a step");
            break;
        }
        }
        if (converged) {
            rec.alpha_k = 0;
            rec.u = std::move(u);
            rec.w = std::move(w);
            rec.rel_diff = rel_diff_value(best, P.reference);
            rec.lemma_slack = kNaN;
            rec.elapsed_ms = ms_since(t0);
            out.records.push_back(std::move(rec));
            out.stop_reason = StopReason::Converged;
            break;
        }

        rec.alpha_k = alpha;
        Vector y = x - alpha * u;
        rec.y = y;
        rec.u = std::move(u);
        rec.w = std::move(w);

        ProxCertificate cert;
        if (algo == Algorithm::Pss && P.exact_prox_g) {
            cert.x_bar = P.exact_prox_g(alpha, y);
            cert.w_bar = (y - cert.x_bar) / alpha;
            cert.eps_bar = 0;
            cert.criterion = ProxCriterion::r_absolute(0);
            cert.inner_iterations = 1;
        } else {
            ProxCriterion crit = ProxCriterion::absolute_gap(1e-12);
            if (algo == Algorithm::Pesm1) {
                rec.r_k = cfg.r_schedule(k + 1);
                crit = ProxCriterion::r_absolute(rec.r_k);
            } else if (algo == Algorithm::Pesm2) {
                crit = ProxCriterion::sigma_approx(cfg.sigma);
            }
            cert = P.prox_g(alpha, y, crit, cfg.max_inner, nullptr,
                            cfg.warm_start ? &warm : nullptr);
        }
        out.tracker.observe_wbar(cert.w_bar);
        rec.w_bar = cert.w_bar;
        rec.eps_bar_k = cert.eps_bar;
        rec.residual_lhs = cert.lhs;
        rec.residual_rhs = cert.rhs;
        rec.inner_iterations = cert.inner_iterations;
        out.total_inner += cert.inner_iterations;
        rec.flagged = cert.budget_exhausted;
        if (rec.flagged) ++out.flagged_count;

        Vector x_next = P.C.project(y - alpha * cert.w_bar);

        if (has_ref && cfg.compute_lemma_slack && algo != Algorithm::Ipgm)
            rec.lemma_slack = verify_descent_lemma(rec, x_next, x_star, s_star, algo, cfg.sigma);
        else
            rec.lemma_slack = kNaN;
        rec.rel_diff = rel_diff_value(best, P.reference);
        rec.elapsed_ms = ms_since(t0);

        const double step_norm = (x_next - x).norm();
        out.records.push_back(std::move(rec));
        x = std::move(x_next);

        bool stop = cfg.stop.kind == StoppingRule::Kind::SquaredStep
                        ? step_norm * step_norm <= cfg.stop.tol
                        : step_norm / std::max(x.norm(), 1e-16) <= cfg.stop.tol;
        if (stop) {
            out.stop_reason = StopReason::Rule;
            break;
        }
    }

    out.final_x = std::move(x);
    out.solve_seconds = ms_since(t0) / 1000.0;
    return out;
}

}  // namespace

RunResult pesm1_run(const ProblemInstance& problem, const SolverConfig& config) {
    SolverConfig cfg = config;
    cfg.algo = Algorithm::Pesm1;
    return subgradient_loop(problem, cfg);
}

RunResult pesm2_run(const ProblemInstance& problem, const SolverConfig& config) {
    SolverConfig cfg = config;
    cfg.algo = Algorithm::Pesm2;
    return subgradient_loop(problem, cfg);
}

RunResult pss_run(const ProblemInstance& problem, const SolverConfig& config) {
    SolverConfig cfg = config;
    cfg.algo = Algorithm::Pss;
    return subgradient_loop(problem, cfg);
}

RunResult accel_run(const ProblemInstance& problem, const SolverConfig& config) {
    SolverConfig cfg = config;
    cfg.algo = Algorithm::Accel;
    cfg.validate();
    if (!problem.f.is_smooth || !problem.L)
        throw std::invalid_argument("accel_run: needs a smooth f with a known Lipschitz constant");
    const double L = *problem.L;
    const double sigma2 = cfg.sigma2;
    const double sigma = std::sqrt(sigma2);
    const double alpha = sigma2 / L;
    const auto t0 = std::chrono::steady_clock::now();

    RunResult out;
    AccelTrace trace;
    trace.alpha = alpha;
    trace.sigma2 = sigma2;
    trace.x0 = problem.x0;

    const bool has_ref = problem.reference.has_value();
    Vector x = problem.x0;
    Vector x_bar_prev = problem.x0;
    double t_prev = 0;
    Vector cum_slope = Vector::Zero(problem.x0.size());
    double cum_intercept = 0;
    Vector warm;
    double best = std::numeric_limits<double>::infinity();

    for (int k = 1; k <= cfg.max_outer; ++k) {
        double beta = 0, t = 0;
        accel_step_coeffs(alpha, sigma2, t_prev, beta, t);
        Vector x_tilde = (t_prev / t) * x_bar_prev + (beta / t) * x;
        Vector grad = problem.f.gradient(x_tilde);
        Vector y = x_tilde - alpha * grad;
        AccelProxContext ctx{x_tilde, grad};
        ProxCertificate cert = problem.prox_g(alpha, y, ProxCriterion::accel(sigma),
                                              cfg.max_inner, &ctx,
                                              cfg.warm_start ? &warm : nullptr);
        Vector slope = grad + cert.w_bar;
        Vector x_next = x - beta * slope;

        double F_xbar = problem.objective(cert.x_bar);
        best = std::min(best, F_xbar);
        double eps_k = std::max(
            0.0, problem.f.value(cert.x_bar) - problem.f.value(x_tilde) -
                     inner(grad, cert.x_bar - x_tilde));
        double intercept = F_xbar - inner(slope, cert.x_bar) - cert.eps_bar - eps_k;
        cum_slope += beta * slope;
        cum_intercept += beta * intercept;
        double eta = cum_intercept + inner(cum_slope, x_next) +
                     0.5 * (x_next - problem.x0).squaredNorm();

        out.tracker.observe_u(grad);
        out.tracker.observe_wbar(cert.w_bar);
        out.total_inner += cert.inner_iterations;
        if (cert.budget_exhausted) ++out.flagged_count;

        IterateRecord rec;
        rec.k = k;
        rec.x = cert.x_bar;
        rec.y = y;
        rec.u = grad;
        rec.w_bar = cert.w_bar;
        rec.eps_k = eps_k;
        rec.eps_bar_k = cert.eps_bar;
        rec.alpha_k = alpha;
        rec.func_val = F_xbar;
        rec.best_val = best;
        rec.residual_lhs = cert.lhs;
        rec.residual_rhs = cert.rhs;
        rec.inner_iterations = cert.inner_iterations;
        rec.flagged = cert.budget_exhausted;
        rec.lemma_slack = kNaN;
        rec.rel_diff = rel_diff_value(best, problem.reference);
        rec.elapsed_ms = ms_since(t0);
        (void)has_ref;

        AccelIter it;
        it.beta = beta;
        it.t = t;
        it.eta = eta;
        it.F_xbar = F_xbar;
        it.eps_k = eps_k;
        it.eps_bar = cert.eps_bar;
        it.x_tilde = std::move(x_tilde);
        it.x_bar = cert.x_bar;
        it.x_point = x_next;
        it.slope = std::move(slope);
        it.intercept = intercept;
        trace.iters.push_back(std::move(it));

        const double step_norm = (cert.x_bar - x_bar_prev).norm();
        x_bar_prev = std::move(cert.x_bar);
        x = std::move(x_next);
        t_prev = t;
        out.records.push_back(std::move(rec));

        bool stop = cfg.stop.kind == StoppingRule::Kind::SquaredStep
                        ? step_norm * step_norm <= cfg.stop.tol
                        : step_norm / std::max(x_bar_prev.norm(), 1e-16) <= cfg.stop.tol;
        if (k > 1 && stop) {
            out.stop_reason = StopReason::Rule;
            break;
        }
    }

    out.final_x = x_bar_prev;
    out.accel = std::move(trace);
    out.solve_seconds = ms_since(t0) / 1000.0;
    return out;
}

RunResult ipgm_run(const ProblemInstance& problem, const SolverConfig& config) {
    SolverConfig cfg = config;
    cfg.algo = Algorithm::Ipgm;
    cfg.validate();
    if (!problem.f.is_smooth || !problem.L)
        throw std::invalid_argument("ipgm_run: needs a smooth f with a known Lipschitz constant");
    const double alpha = cfg.stepsize.kind == StepsizePolicy::Kind::Constant
                             ? cfg.stepsize.alpha
                             : 1.0 / *problem.L;
    const auto t0 = std::chrono::steady_clock::now();

    RunResult out;
    Vector x = problem.x0;
    Vector x_prev = problem.x0;
    Vector warm;
    double best = std::numeric_limits<double>::infinity();

    for (int k = 1; k <= cfg.max_outer; ++k) {
        IterateRecord rec;
        rec.k = k;
        rec.x = x;
        rec.func_val = problem.objective(x);
        best = std::min(best, rec.func_val);
        rec.best_val = best;
        rec.alpha_k = alpha;

        Vector z = x;
        if (cfg.ipgm_extrapolation && k > 1)
            z = x + ((k - 1.0) / (k + 2.0)) * (x - x_prev);
        Vector grad = problem.f.gradient(z);
        Vector y = z - alpha * grad;
        double e_k = cfg.e_schedule(k + 1);
        ProxCertificate cert = problem.prox_g(alpha, y, ProxCriterion::absolute_gap(e_k),
                                              cfg.max_inner, nullptr,
                                              cfg.warm_start ? &warm : nullptr);
        out.tracker.observe_u(grad);
        out.tracker.observe_wbar(cert.w_bar);
        out.total_inner += cert.inner_iterations;
        if (cert.budget_exhausted) ++out.flagged_count;

        rec.y = std::move(y);
        rec.u = std::move(grad);
        rec.w_bar = cert.w_bar;
        rec.eps_bar_k = cert.eps_bar;
        rec.r_k = e_k;
        rec.residual_lhs = cert.lhs;
        rec.residual_rhs = cert.rhs;
        rec.inner_iterations = cert.inner_iterations;
        rec.flagged = cert.budget_exhausted;
        rec.lemma_slack = kNaN;
        rec.rel_diff = rel_diff_value(best, problem.reference);
        rec.elapsed_ms = ms_since(t0);

        Vector x_next = cert.x_bar;
        const double step_norm = (x_next - x).norm();
        x_prev = std::move(x);
        x = std::move(x_next);
        out.records.push_back(std::move(rec));

        bool stop = cfg.stop.kind == StoppingRule::Kind::SquaredStep
                        ? step_norm * step_norm <= cfg.stop.tol
                        : step_norm / std::max(x.norm(), 1e-16) <= cfg.stop.tol;
        if (stop) {
            out.stop_reason = StopReason::Rule;
            break;
        }
    }

    out.final_x = std::move(x);
    out.solve_seconds = ms_since(t0) / 1000.0;
    return out;
}

RunResult run_solver(const ProblemInstance& problem, const SolverConfig& config) {
    switch (config.algo) {
    case Algorithm::Pesm1: return pesm1_run(problem, config);
    case Algorithm::Pesm2: return pesm2_run(problem, config);
    case Algorithm::Accel: return accel_run(problem, config);
    case Algorithm::Pss: return pss_run(problem, config);
    case Algorithm::Ipgm: return ipgm_run(problem, config);
    }
    throw std::logic_error("run_solver: unreachable");
}

}  // namespace proxeps
