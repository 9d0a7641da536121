#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "proxeps/problems.hpp"
#include "proxeps/solvers.hpp"

namespace proxeps {

/// Flat experiment description; every field maps 1:1 to a config-file key
/// and a CLI flag (the flag wins).
struct ExperimentConfig {
    // problem
    std::string problem = "lasso";  // lasso | tv | toy1d
    int n = 5;                      // lasso dimension / TV image side
    std::uint64_t seed = 1;
    std::string image;              // optional PGM path (tv)
    double tau = 1e-4;
    double noise_std = 1e-4;
    bool with_reference = true;
    int reference_iterations = 0;   // 0 = per-problem default
    // solver
    std::string algo = "pesm1";
    std::string stepsize;           // const:A | dim:A0[:P] | polyak-exact[:GAMMA] | polyak:S0[:GLO[:GHI]]
    std::string rk_schedule = "pow:1:1";
    std::string epsk_schedule = "pow:1:1";
    std::string ek_schedule = "pow:1:1.5";  // sqrt(e_k) = C / k^q
    double sigma2 = 0.25;           // accel uses sigma2, pesm2 uses sqrt(sigma2)
    int max_outer = 0;              // 0 = per-problem default
    int max_inner = 3000;
    double tol = 0;                 // 0 = per-problem default
    std::string stop;               // sqstep | reldiff; empty = per-problem default
    bool warm_start = false;
    bool ipgm_extrapolation = false;
    double c_override = 0;
    // output
    std::string out;                // per-iteration CSV path; empty = none
    std::string label;              // defaults to the algorithm name

    /// Throws std::invalid_argument naming every offending field.
    void validate() const;
};

struct SummaryRow {
    std::string label;
    double rel_diff = 0;
    double func_val = 0;
    double cpu_seconds = 0;
    long long ext_it = 0;
    long long int_it = 0;
    int flagged = 0;
};

struct ExperimentResult {
    SummaryRow row;
    RunResult run;
    std::vector<std::string> warnings;
};

ProblemInstance build_problem(const ExperimentConfig& cfg);
SolverConfig build_solver_config(const ExperimentConfig& cfg, const ProblemInstance& problem,
                                 std::vector<std::string>* warnings = nullptr);
StepsizePolicy parse_stepsize(const std::string& spec);

/// Mandated telemetry columns, '.' decimals, LF endings, deterministic
/// except elapsed_ms.
std::string records_to_csv(const std::vector<IterateRecord>& records);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Aligned text table over rows sorted (stably) by label.
std::string compare_table(std::vector<SummaryRow> rows);
/// Same values, machine-readable.
std::string compare_csv(std::vector<SummaryRow> rows);

/// key=value lines; [section] headers and '#' comments are skipped.
std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path);
/// Assigns one key to its config field; throws on unknown keys or bad values.
void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Runs experiments concurrently, at most max_batch_threads() workers.
std::vector<ExperimentResult> run_batch(const std::vector<ExperimentConfig>& configs);
/// PROXEPS_THREADS when set, else hardware concurrency (>= 1).
int max_batch_threads();

/// Invariant suites: lemmas | accel | prox | oracles. Prints a report and
/// returns the number of violations.
int verify_suite(const std::string& name, std::ostream& os);

}  // namespace proxeps
