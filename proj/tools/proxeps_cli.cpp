#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "proxeps/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"proxeps: inexact proximal epsilon-subgradient solvers and benchmarks"};
    app.require_subcommand(1);

    // ---- run ----
    auto* run = app.add_subcommand("run", "run one experiment and print its summary row");
    std::string config_path;
    run->add_option("--config", config_path, "key=value config file (flags override it)");
    struct Flag {
        std::string key;
        std::string value;
        bool set = false;
    };
    std::vector<Flag> flags = {
        {"problem"}, {"n"}, {"seed"}, {"image"}, {"tau"}, {"noise-std"},
        {"with-reference"}, {"reference-iterations"}, {"algo"}, {"stepsize"},
        {"rk-schedule"}, {"epsk-schedule"}, {"ek-schedule"}, {"sigma2"},
        {"max-outer"}, {"max-inner"}, {"tol"}, {"stop"}, {"warm-start"},
        {"ipgm-extrapolation"}, {"c-override"}, {"out"}, {"label"},
    };
    for (auto& f : flags) {
        run->add_option_function<std::string>(
            "--" + f.key,
            [&f](const std::string& v) {
                f.value = v;
                f.set = true;
            },
            "sets config key '" + f.key + "'");
    }

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "run an invariant suite; exits nonzero on violation");
    std::string suite;
    verify->add_option("--suite", suite, "lemmas | accel | prox | oracles")
        ->required()
        ->check(CLI::IsMember({"lemmas", "accel", "prox", "oracles"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*verify) {
            int violations = proxeps::verify_suite(suite, std::cout);
            return violations == 0 ? 0 : 1;
        }

        proxeps::ExperimentConfig cfg;
        if (!config_path.empty())
            for (const auto& [k, v] : proxeps::parse_config_file(config_path))
                proxeps::apply_key(cfg, k, v);
        for (const auto& f : flags)
            if (f.set) proxeps::apply_key(cfg, f.key, f.value);
        cfg.validate();

        proxeps::ExperimentResult res = proxeps::run_experiment(cfg);
        for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
        std::cout << proxeps::compare_table({res.row});
        if (!cfg.out.empty()) std::cout << "wrote " << cfg.out << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
