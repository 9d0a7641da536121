#include "proxeps/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace proxeps {

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}
std::string g17(double v) { return fmt("%.17g", v); }
std::string g6(double v) { return fmt("%.6g", v); }

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

bool parse_bool(const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

/// Schedule for e_k given the spec of sqrt(e_k).
Schedule square_schedule(const std::string& spec) {
    Schedule s = Schedule::parse(spec);
    switch (s.kind) {
    case Schedule::Kind::Zero:
        return s;
    case Schedule::Kind::Constant:
        return Schedule::constant(s.a * s.a);
    case Schedule::Kind::Power:
        return Schedule::power(s.a * s.a, 2.0 * s.p);
    }
    throw std::logic_error("square_schedule: unreachable");
}

}  // namespace

StepsizePolicy parse_stepsize(const std::string& spec) {
    auto parts = split(spec, ':');
    const std::string& head = parts[0];
    if (head == "const") {
        if (parts.size() != 2) throw std::invalid_argument("stepsize: expected const:A");
        return StepsizePolicy::constant(std::stod(parts[1]));
    }
    if (head == "dim") {
        if (parts.size() < 2 || parts.size() > 3)
            throw std::invalid_argument("stepsize: expected dim:A0[:P]");
        double p = parts.size() == 3 ? std::stod(parts[2]) : 1.0;
        return StepsizePolicy::diminishing(std::stod(parts[1]), p);
    }
    if (head == "polyak-exact") {
        if (parts.size() > 2) throw std::invalid_argument("stepsize: expected polyak-exact[:GAMMA]");
        double gamma = parts.size() == 2 ? std::stod(parts[1]) : 1.0;
        // s_star is filled in from the problem reference by build_solver_config
        return StepsizePolicy::polyak_exact(0.0, gamma);
    }
    if (head == "polyak") {
        if (parts.size() < 2 || parts.size() > 4)
            throw std::invalid_argument("stepsize: expected polyak:S0[:GLO[:GHI]]");
        StepsizePolicy p;
        p.kind = StepsizePolicy::Kind::PolyakAlg1;
        p.s0 = std::stod(parts[1]);
        p.gamma_lo = parts.size() >= 3 ? std::stod(parts[2]) : 1.0;
        p.gamma_hi = parts.size() >= 4 ? std::stod(parts[3]) : p.gamma_lo;
        p.validate();
        return p;
    }
    throw std::invalid_argument("stepsize: unrecognized spec '" + spec + "'");
}

void ExperimentConfig::validate() const {
    std::vector<std::string> errors;
    if (problem != "lasso" && problem != "tv" && problem != "toy1d")
        errors.push_back("problem: must be lasso, tv or toy1d");
    if (n < 1) errors.push_back("n: must be >= 1");
    if (problem == "tv" && n < 4) errors.push_back("n: tv needs n >= 4");
    if (problem == "tv" && !(tau > 0)) errors.push_back("tau: must be positive");
    if (noise_std < 0) errors.push_back("noise_std: must be >= 0");
    try {
        parse_algorithm(algo);
    } catch (const std::exception&) {
        errors.push_back("algo: must be pesm1, pesm2, accel, pss or ipgm");
    }
    if (algo == "accel" && !(sigma2 > 0 && sigma2 < 0.5))
        errors.push_back("sigma2: must lie in (0,1/2) for accel");
    if (algo == "pesm2" && !(sigma2 >= 0 && sigma2 < 1))
        errors.push_back("sigma2: must lie in [0,1) for pesm2");
    if (!stepsize.empty()) {
        try {
            parse_stepsize(stepsize);
        } catch (const std::exception& e) {
            errors.push_back(std::string("stepsize: ") + e.what());
        }
    }
    for (auto [key, spec] : {std::pair<const char*, const std::string*>{"rk_schedule", &rk_schedule},
                             {"epsk_schedule", &epsk_schedule},
                             {"ek_schedule", &ek_schedule}}) {
        try {
            Schedule::parse(*spec);
        } catch (const std::exception& e) {
            errors.push_back(std::string(key) + ": " + e.what());
        }
    }
    if (max_outer < 0) errors.push_back("max_outer: must be >= 0");
    if (max_inner < 1) errors.push_back("max_inner: must be >= 1");
    if (tol < 0) errors.push_back("tol: must be >= 0");
    if (!stop.empty() && stop != "sqstep" && stop != "reldiff")
        errors.push_back("stop: must be sqstep or reldiff");
    if (reference_iterations < 0) errors.push_back("reference_iterations: must be >= 0");
    if (!errors.empty()) {
        std::string msg = "invalid experiment config:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw std::invalid_argument(msg);
    }
}

ProblemInstance build_problem(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.problem == "lasso") {
        int it = cfg.reference_iterations > 0 ? cfg.reference_iterations : 20000;
        return make_lasso(cfg.n, cfg.seed, cfg.with_reference, it);
    }
    if (cfg.problem == "toy1d") return make_toy1d(cfg.seed);
    int it = cfg.reference_iterations > 0 ? cfg.reference_iterations : 5000;
    if (!cfg.image.empty()) {
        int rows = 0, cols = 0;
        Vector img = read_pgm(cfg.image, rows, cols);
        if (rows != cols) throw std::invalid_argument("image: must be square for tv");
        return make_tv_deblur(rows, cfg.tau, cfg.noise_std, cfg.seed, cfg.with_reference, it, &img);
    }
    return make_tv_deblur(cfg.n, cfg.tau, cfg.noise_std, cfg.seed, cfg.with_reference, it);
}

SolverConfig build_solver_config(const ExperimentConfig& cfg, const ProblemInstance& problem,
                                 std::vector<std::string>* warnings) {
    cfg.validate();
    SolverConfig sc;
    sc.algo = parse_algorithm(cfg.algo);
    const bool is_tv = cfg.problem == "tv";
    if (sc.algo == Algorithm::Pesm1 && is_tv)
        throw std::invalid_argument(
            "algo: pesm1 needs an exact-subgradient prox certificate, which the tv dual solver "
            "cannot produce; use pesm2, accel or ipgm");

    if (!cfg.stepsize.empty()) {
        sc.stepsize = parse_stepsize(cfg.stepsize);
        if (sc.stepsize.kind == StepsizePolicy::Kind::PolyakExact) {
            if (!problem.reference)
                throw std::invalid_argument("stepsize: polyak-exact needs a problem reference");
            sc.stepsize.s_star = problem.reference->s_star;
        }
        if (sc.stepsize.kind == StepsizePolicy::Kind::PolyakAlg1 && sc.algo == Algorithm::Pesm2)
            sc.stepsize.kind = StepsizePolicy::Kind::PolyakAlg2;
    } else {
        double L = problem.L.value_or(1.0);
        if (is_tv || sc.algo == Algorithm::Ipgm)
            sc.stepsize = StepsizePolicy::constant(1.0 / L);
        else
            sc.stepsize = StepsizePolicy::diminishing(1.0 / L, 1.0);
    }

    sc.r_schedule = Schedule::parse(cfg.rk_schedule);
    sc.eps_schedule = Schedule::parse(cfg.epsk_schedule);
    sc.e_schedule = square_schedule(cfg.ek_schedule);
    sc.sigma2 = cfg.sigma2;
    sc.sigma = std::sqrt(std::max(cfg.sigma2, 0.0));
    sc.max_outer = cfg.max_outer > 0 ? cfg.max_outer : (is_tv ? 5000 : 1000);
    sc.max_inner = cfg.max_inner;
    sc.stop.kind = cfg.stop.empty()
                       ? (is_tv ? StoppingRule::Kind::RelativeDiff : StoppingRule::Kind::SquaredStep)
                       : (cfg.stop == "reldiff" ? StoppingRule::Kind::RelativeDiff
                                                : StoppingRule::Kind::SquaredStep);
    sc.stop.tol = cfg.tol > 0 ? cfg.tol : 1e-4;
    sc.warm_start = cfg.warm_start;
    sc.ipgm_extrapolation = cfg.ipgm_extrapolation;
    sc.c_override = cfg.c_override;

    if (warnings) {
        if (sc.algo == Algorithm::Ipgm) {
            Schedule sq = Schedule::parse(cfg.ek_schedule);  // schedule of sqrt(e_k)
            bool summable = sq.kind == Schedule::Kind::Zero ||
                            (sq.kind == Schedule::Kind::Power && sq.p > 2) ||
                            (sq.kind == Schedule::Kind::Constant && sq.a == 0);
            if (!summable)
                warnings->push_back("ek_schedule: (k*sqrt(e_k)) is not summable for '" +
                                    cfg.ek_schedule + "'");
        }
        if (sc.algo == Algorithm::Pesm1) {
            const Schedule& r = sc.r_schedule;
            bool sq_summable = r.kind == Schedule::Kind::Zero ||
                               (r.kind == Schedule::Kind::Power && r.p > 0.5) ||
                               (r.kind == Schedule::Kind::Constant && r.a == 0);
            if (!sq_summable)
                warnings->push_back("rk_schedule: sum of r_k^2 diverges for '" + sc.r_schedule.str() +
                                    "'");
        }
    }
    sc.validate();
    return sc;
}

std::string records_to_csv(const std::vector<IterateRecord>& records) {
    std::string out =
        "iter,func_val,best_val,alpha_k,eps_k,eps_bar_k,residual_lhs,residual_rhs,"
        "inner_iters,flagged,rel_diff,elapsed_ms\n";
    for (const auto& r : records) {
        out += std::to_string(r.k);
        out += ',' + g17(r.func_val);
        out += ',' + g17(r.best_val);
        out += ',' + g17(r.alpha_k);
        out += ',' + g17(r.eps_k);
        out += ',' + g17(r.eps_bar_k);
        out += ',' + g17(r.residual_lhs);
        out += ',' + g17(r.residual_rhs);
        out += ',' + std::to_string(r.inner_iterations);
        out += ',' + std::string(r.flagged ? "1" : "0");
        out += ',' + g17(r.rel_diff);
        out += ',' + g17(r.elapsed_ms);
        out += '\n';
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ExperimentResult res;
    ProblemInstance problem = build_problem(cfg);
    SolverConfig sc = build_solver_config(cfg, problem, &res.warnings);
    res.run = run_solver(problem, sc);

    res.row.label = cfg.label.empty() ? cfg.algo : cfg.label;
    if (!res.run.records.empty()) {
        const auto& last = res.run.records.back();
        res.row.rel_diff = last.rel_diff;
        res.row.func_val = last.best_val;
    }
    res.row.cpu_seconds = res.run.solve_seconds;
    res.row.ext_it = static_cast<long long>(res.run.records.size());
    res.row.int_it = res.run.total_inner;
    res.row.flagged = res.run.flagged_count;

    if (!cfg.out.empty()) {
        std::ofstream f(cfg.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file '" + cfg.out + "'");
        f << records_to_csv(res.run.records);
        if (!f) throw std::runtime_error("write failed for '" + cfg.out + "'");
    }
    return res;
}

namespace {

struct RowText {
    std::string label, rel, fv, cpu, ext, internal, flg;
};

RowText row_text(const SummaryRow& r) {
    return {r.label,        g6(r.rel_diff),          g6(r.func_val),
            fmt("%.3f", r.cpu_seconds), std::to_string(r.ext_it), std::to_string(r.int_it),
            std::to_string(r.flagged)};
}

void sort_rows(std::vector<SummaryRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("compare table needs at least one row");
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SummaryRow& a, const SummaryRow& b) { return a.label < b.label; });
}

}  // namespace

std::string compare_table(std::vector<SummaryRow> rows) {
    sort_rows(rows);
    const char* headers[7] = {"Method", "RelDiff", "FuncVal", "CPUtime", "ExtIt", "IntIt", "Flagged"};
    std::vector<RowText> texts;
    std::size_t w[7];
    for (int c = 0; c < 7; ++c) w[c] = std::string(headers[c]).size();
    for (const auto& r : rows) {
        RowText t = row_text(r);
        const std::string* f[7] = {&t.label, &t.rel, &t.fv, &t.cpu, &t.ext, &t.internal, &t.flg};
        for (int c = 0; c < 7; ++c) w[c] = std::max(w[c], f[c]->size());
        texts.push_back(std::move(t));
    }
    std::ostringstream os;
    for (int c = 0; c < 7; ++c) {
        std::string h = headers[c];
        os << h << std::string(w[c] - h.size(), ' ');
        if (c + 1 < 7) os << "  ";
    }
    os << '\n';
    for (const auto& t : texts) {
        const std::string* f[7] = {&t.label, &t.rel, &t.fv, &t.cpu, &t.ext, &t.internal, &t.flg};
        for (int c = 0; c < 7; ++c) {
            os << *f[c] << std::string(w[c] - f[c]->size(), ' ');
            if (c + 1 < 7) os << "  ";
        }
        os << '\n';
    }
    return os.str();
}

std::string compare_csv(std::vector<SummaryRow> rows) {
    sort_rows(rows);
    std::string out = "method,rel_diff,func_val,cpu_seconds,ext_it,int_it,flagged\n";
    for (const auto& r : rows) {
        RowText t = row_text(r);
        out += t.label + ',' + t.rel + ',' + t.fv + ',' + t.cpu + ',' + t.ext + ',' + t.internal +
               ',' + t.flg + '\n';
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(f, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') continue;  // section header, informational
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config file '" + path + "' line " + std::to_string(lineno) +
                                     ": expected key=value");
        kv.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return kv;
}

void apply_key(ExperimentConfig& cfg, const std::string& key_raw, const std::string& value) {
    std::string key = key_raw;
    std::replace(key.begin(), key.end(), '_', '-');
    try {
        if (key == "problem") cfg.problem = value;
        else if (key == "n") cfg.n = std::stoi(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "image") cfg.image = value;
        else if (key == "tau") cfg.tau = std::stod(value);
        else if (key == "noise-std") cfg.noise_std = std::stod(value);
        else if (key == "with-reference") cfg.with_reference = parse_bool(value);
        else if (key == "reference-iterations") cfg.reference_iterations = std::stoi(value);
        else if (key == "algo") cfg.algo = value;
        else if (key == "stepsize") cfg.stepsize = value;
        else if (key == "rk-schedule") cfg.rk_schedule = value;
        else if (key == "epsk-schedule") cfg.epsk_schedule = value;
        else if (key == "ek-schedule") cfg.ek_schedule = value;
        else if (key == "sigma2") cfg.sigma2 = std::stod(value);
        else if (key == "max-outer") cfg.max_outer = std::stoi(value);
        else if (key == "max-inner") cfg.max_inner = std::stoi(value);
        else if (key == "tol") cfg.tol = std::stod(value);
        else if (key == "stop") cfg.stop = value;
        else if (key == "warm-start") cfg.warm_start = parse_bool(value);
        else if (key == "ipgm-extrapolation") cfg.ipgm_extrapolation = parse_bool(value);
        else if (key == "c-override") cfg.c_override = std::stod(value);
        else if (key == "out") cfg.out = value;
        else if (key == "label") cfg.label = value;
        else throw std::invalid_argument("unknown config key '" + key_raw + "'");
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        throw std::invalid_argument("config key '" + key_raw + "': bad value '" + value + "' (" +
                                    e.what() + ")");
    }
}

int max_batch_threads() {
    if (const char* env = std::getenv("PROXEPS_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc >= 1 ? static_cast<int>(hc) : 1;
}

std::vector<ExperimentResult> run_batch(const std::vector<ExperimentConfig>& configs) {
    std::vector<ExperimentResult> results(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
    std::atomic<std::size_t> next{0};
    int workers = std::min<int>(max_batch_threads(), static_cast<int>(configs.size()));
    workers = std::max(workers, 1);
    auto work = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            try {
                results[i] = run_experiment(configs[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

// ---- verify suites ----

namespace {

struct Check {
    std::ostream& os;
    int violations = 0;
    void expect(bool ok, const std::string& what) {
        if (!ok) {
            ++violations;
            os << "  VIOLATION: " << what << '\n';
        }
    }
};

int verify_oracles(std::ostream& os) {
    Check c{os};
    Rng rng(2024);
    FunctionOracle absf = make_abs_oracle();

    // probe set for the brute-force membership test
    std::vector<double> probes = {-200, -50, -10, 10, 50, 200};
    for (double s = -3; s <= 3.0001; s += 0.05) probes.push_back(s);

    int interval_fail = 0;
    for (int i = 0; i < 1000; ++i) {
        double t = rng.uniform(-3, 3);
        double eps = rng.uniform(0, 2);
        Interval iv = eps_subdiff_interval_abs(t, eps);
        auto member = [&](double v) {
            for (double s : probes)
                if (std::abs(s) - std::abs(t) - v * (s - t) + eps < -1e-9) return false;
            return true;
        };
        double lo_bf = 10, hi_bf = -10;
        for (double v = -1.5; v <= 1.5001; v += 0.002) {
            if (member(v)) {
                lo_bf = std::min(lo_bf, v);
                hi_bf = std::max(hi_bf, v);
            }
        }
        if (std::abs(iv.lo - lo_bf) > 0.02 || std::abs(iv.hi - hi_bf) > 0.02) ++interval_fail;
    }
    c.expect(interval_fail == 0, "eps-subdifferential interval formula disagrees with brute force on " +
                                     std::to_string(interval_fail) + " of 1000 pairs");

    // sampled eps-subgradients of the l1 oracle pass the exact membership test
    auto shared = std::make_shared<Rng>(99);
    FunctionOracle l1 = make_l1_oracle(shared);
    int member_fail = 0;
    for (int i = 0; i < 200; ++i) {
        int n = 1 + static_cast<int>(rng.uniform(0, 6));
        Vector x(n);
        for (int j = 0; j < n; ++j) x[j] = rng.uniform(-2, 2);
        double eps = rng.uniform(0, 1);
        Vector u = l1.eps_subgrad(x, eps);
        if (!l1_membership(x, u, eps)) ++member_fail;
    }
    c.expect(member_fail == 0, "sampled l1 eps-subgradients failed exact membership " +
                                   std::to_string(member_fail) + " times");

    // least-squares eps-subgradients respect their budget
    Rng mrng(5);
    int n = 6;
    Matrix M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = mrng.normal();
    Matrix A = M.transpose() * M;
    Vector b = Vector::Ones(n);
    FunctionOracle ls = make_least_squares_oracle(A, b, std::make_shared<Rng>(11));
    int budget_fail = 0;
    for (int i = 0; i < 200; ++i) {
        Vector x(n);
        for (int j = 0; j < n; ++j) x[j] = rng.uniform(-1, 1);
        double eps = rng.uniform(1e-6, 0.5);
        Vector u = ls.eps_subgrad(x, eps);
        // u is the exact gradient at a nearby z; the induced eps at x must be <= budget
        std::vector<Vector> pr;
        for (int q = 0; q < 20; ++q) {
            Vector p(n);
            for (int j = 0; j < n; ++j) p[j] = rng.uniform(-2, 2);
            pr.push_back(p);
        }
        if (!check_eps_subgradient(ls, x, u, eps, pr, 1e-9)) ++budget_fail;
    }
    c.expect(budget_fail == 0, "least-squares eps-subgradients exceeded the budget " +
                                   std::to_string(budget_fail) + " times");
    return c.violations;
}

int verify_prox(std::ostream& os) {
    Check c{os};
    Rng rng(2025);
    auto l1_prox = [](double a, const Vector& z) { return prox_l1(a, z); };
    auto wsel = [](const Vector& xb, const Vector& y, double a) {
        return l1_min_residual_subgradient(xb, y, a);
    };
    int dist_fail = 0, conv_fail = 0, conv_sq_fail = 0, nest_fail = 0, grid_fail = 0;
    for (int i = 0; i < 1000; ++i) {
        double alpha = std::exp(rng.uniform(-2, 1));
        Vector y(1);
        y[0] = rng.uniform(-3, 3);
        double r = rng.uniform(1e-4, 1.0);
        Vector p = prox_l1(alpha, y);
        if (i < 100) {
            // brute-force grid minimization of the proximal objective
            double best = 1e300, bx = 0;
            for (double x = -4; x <= 4.0001; x += 1e-3) {
                double phi = alpha * std::abs(x) + 0.5 * (x - y[0]) * (x - y[0]);
                if (phi < best) {
                    best = phi;
                    bx = x;
                }
            }
            if (std::abs(bx - p[0]) > 2e-3) ++grid_fail;
        }
        ProxCertificate cert = solve_prox_absolute(l1_prox, wsel, alpha, y, r);
        double phi = [&](const Vector& x) {
            return alpha * x.lpNorm<1>() + 0.5 * (x - y).squaredNorm();
        }(cert.x_bar);
        double phi_p = alpha * p.lpNorm<1>() + 0.5 * (p - y).squaredNorm();
        if ((cert.x_bar - p).norm() > r + 1e-12) ++dist_fail;
        // the r-approximate point is e-optimal for the alpha-scaled objective
        double gap = (phi - phi_p) / alpha;
        if (gap > r_to_e(r, alpha) + 1e-12) ++conv_fail;
        if (gap > r_to_e(r, alpha, true) + 1e-12) ++conv_sq_fail;
        // criterion nesting on a random inexact point
        double t = rng.uniform(0, 1);
        Vector xb = p + t * (y - p);
        Vector v = l1_min_residual_subgradient(xb, y, alpha);
        double sigma = rng.uniform(0.05, 0.95);
        CheckResult strong = check_sigma_approximate(alpha, y, xb, v, 0.0, sigma);
        CheckResult quasi = check_sigma_quasi_approximate(alpha, y, xb, v, 0.0, sigma);
        if (strong.pass && !quasi.pass) ++nest_fail;
    }
    c.expect(grid_fail == 0, "soft threshold disagrees with grid minimization " +
                                 std::to_string(grid_fail) + " times");
    c.expect(dist_fail == 0,
             "||x_bar - prox|| <= r violated " + std::to_string(dist_fail) + " times");
    c.expect(conv_fail == 0,
             "e = r/(2 alpha) conversion violated " + std::to_string(conv_fail) + " times");
    c.expect(conv_sq_fail == 0,
             "e = r^2/(2 alpha) conversion violated " + std::to_string(conv_sq_fail) + " times");
    c.expect(nest_fail == 0, "criterion nesting violated " + std::to_string(nest_fail) + " times");
    return c.violations;
}

int verify_lemmas(std::ostream& os) {
    Check c{os};
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        for (int n : {2, 5}) {
            ProblemInstance prob = make_lasso(n, seed, true, 20000);
            double scale = std::max(1.0, prob.reference->d0 * prob.reference->d0);
            const double tol = 1e-9 * scale;

            SolverConfig cfg;
            cfg.stepsize = StepsizePolicy::diminishing(1.0 / *prob.L, 1.0);
            cfg.r_schedule = Schedule::power(1, 1);
            cfg.eps_schedule = Schedule::power(1, 1);
            cfg.max_outer = 100;
            cfg.stop.tol = 1e-30;

            RunResult r1 = pesm1_run(prob, cfg);
            for (const auto& rec : r1.records)
                c.expect(!(rec.lemma_slack < -tol),
                         "pesm1 slack " + std::to_string(rec.lemma_slack) + " at k=" +
                             std::to_string(rec.k) + " (seed " + std::to_string(seed) + ", n=" +
                             std::to_string(n) + ")");
            for (std::size_t k = 0; k < r1.records.size(); ++k) {
                double bound = rate_bound_alg1(r1.records, prob.reference->d0, static_cast<int>(k));
                double gap = r1.records[k].best_val - prob.reference->s_star;
                c.expect(gap <= bound + tol, "pesm1 rate bound violated at k=" + std::to_string(k));
            }

            for (double sigma : {0.3, 0.9}) {
                SolverConfig cfg2 = cfg;
                cfg2.sigma = sigma;
                RunResult r2 = pesm2_run(prob, cfg2);
                for (const auto& rec : r2.records)
                    c.expect(!(rec.lemma_slack < -tol),
                             "pesm2 slack " + std::to_string(rec.lemma_slack) + " at k=" +
                                 std::to_string(rec.k));
                for (std::size_t k = 0; k < r2.records.size(); ++k) {
                    double bound =
                        rate_bound_alg2(r2.records, prob.reference->d0, static_cast<int>(k), sigma);
                    double gap = r2.records[k].best_val - prob.reference->s_star;
                    c.expect(gap <= bound + tol,
                             "pesm2 rate bound violated at k=" + std::to_string(k));
                }
            }
        }
    }
    return c.violations;
}

int verify_accel(std::ostream& os) {
    Check c{os};
    Rng prng(17);
    for (std::uint64_t seed : {1ULL, 2ULL}) {
        ProblemInstance prob = make_lasso(5, seed, true, 20000);
        const double L = *prob.L;
        const double d0 = prob.reference->d0;
        const double s_star = prob.reference->s_star;
        for (double sigma2 : {0.1, 0.25, 0.45}) {
            SolverConfig cfg;
            cfg.sigma2 = sigma2;
            cfg.max_outer = 150;
            cfg.stop.tol = 1e-30;
            RunResult rr = accel_run(prob, cfg);
            const AccelTrace& tr = *rr.accel;
            double scale = std::max(1.0, std::abs(prob.objective(prob.x0)));
            const double tol = 1e-9 * scale;
            double prev_gauge = -1e300;
            Vector slope_sum = Vector::Zero(prob.x0.size());
            for (std::size_t i = 0; i < tr.iters.size(); ++i) {
                const AccelIter& it = tr.iters[i];
                int k = static_cast<int>(i) + 1;
                c.expect(it.t >= k * k * sigma2 * sigma2 * (1 - sigma2) / (4 * L) - 1e-12,
                         "t_k lower bound violated at k=" + std::to_string(k));
                double gauge = it.eta - it.t * it.F_xbar;
                c.expect(gauge >= prev_gauge - tol,
                         "eta_k - t_k F(x_bar) decreased at k=" + std::to_string(k));
                prev_gauge = gauge;
                c.expect(it.F_xbar - s_star <= rate_bound_accel(L, d0, sigma2, k) + tol,
                         "accelerated rate bound violated at k=" + std::to_string(k));
                slope_sum += it.beta * it.slope;
                Vector closed = tr.x0 - slope_sum;
                c.expect((closed - it.x_point).norm() <= 1e-9 * (1.0 + closed.norm()),
                         "x_k differs from the model argmin at k=" + std::to_string(k));
            }
            // minorization of the aggregated model at random probes
            int k_last = static_cast<int>(tr.iters.size());
            double t_last = tr.iters.back().t;
            for (int q = 0; q < 100; ++q) {
                Vector probe(prob.x0.size());
                for (Eigen::Index j = 0; j < probe.size(); ++j)
                    probe[j] = prob.reference->x_star[j] + prng.normal();
                double model = tr.weighted_model_at(probe, k_last) / t_last;
                c.expect(model <= prob.objective(probe) + tol,
                         "aggregated model exceeds the objective at a probe point");
            }
        }
    }
    // hand-derived recursion values at alpha = sigma2/L with sigma2 = 0.25, L = 1
    double beta1 = 0, t1 = 0, beta2 = 0, t2 = 0;
    accel_step_coeffs(0.25, 0.25, 0.0, beta1, t1);
    accel_step_coeffs(0.25, 0.25, t1, beta2, t2);
    c.expect(std::abs(beta1 - 0.1875) <= 1e-12, "beta_1 recursion value mismatch");
    c.expect(std::abs(beta2 - 0.303382) <= 1e-6, "beta_2 recursion value mismatch");
    c.expect(std::abs(t2 - 0.490882) <= 1e-5, "t_2 recursion value mismatch");
    c.expect(t2 >= 4 * 0.25 * 0.25 * 0.75 / 4.0, "t_2 lower bound mismatch");
    return c.violations;
}

}  // namespace

int verify_suite(const std::string& name, std::ostream& os) {
    int v = 0;
    if (name == "oracles") v = verify_oracles(os);
    else if (name == "prox") v = verify_prox(os);
    else if (name == "lemmas") v = verify_lemmas(os);
    else if (name == "accel") v = verify_accel(os);
    else throw std::invalid_argument("unknown verify suite '" + name + "'");
    os << "suite " << name << ": " << (v == 0 ? "PASS" : "FAIL") << " (" << v << " violations)\n";
    return v;
}

}  // namespace proxeps
