#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "shrinkage/errors.hpp"
#include "shrinkage/harness/config.hpp"
#include "shrinkage/harness/experiments.hpp"
#include "shrinkage/harness/results.hpp"
#include "shrinkage/harness/selftest.hpp"

namespace sh = shrinkage::harness;

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kNumerical = 2, kIo = 3 };

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian shrinkage prediction experiments"};
    app.set_version_flag("--version", std::string(sh::kVersion));

    std::string experiment;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<long> workers;
    bool paper_scale = false;
    bool intercept = false;

    app.add_option("experiment", experiment,
                   "fit-lines | predictive-cdf | risk-curve | compare-densities | astar-surface | selftest")
        ->required();
    app.add_option("--config", config_path, "JSON config file (optional for selftest)");
    app.add_option("--seed", seed, "master seed (overrides the config)");
    app.add_option("--out", out, "output directory (overrides the config)");
    app.add_flag("--paper-scale", paper_scale, "use 10^4 outer replications");
    app.add_option("--workers", workers, "worker threads (default: SHRINKAGE_LAB_WORKERS or all cores)");
    app.add_flag("--intercept", intercept, "append a constant coordinate to every sample");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    sh::ExperimentConfig cfg;
    unsigned nworkers = 1;
    try {
        const sh::Experiment kind = sh::parse_experiment(experiment);
        if (config_path.empty()) {
            if (kind != sh::Experiment::SelfTest) throw sh::ConfigError("--config is required");
            cfg = sh::parse_config(nlohmann::json::object(), kind);
        } else {
            cfg = sh::load_config(config_path, kind);
        }
        sh::apply_overrides(cfg, sh::Overrides{seed, out, paper_scale, intercept});
        nworkers = sh::resolve_workers(workers);
    } catch (const sh::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    }

    if (cfg.experiment == sh::Experiment::SelfTest) {
        std::cout << "selftest suite:\n";
        for (const auto& name : sh::selftest_suite()) std::cout << "  " << name << '\n';
    }

    sh::ExperimentOutput result;
    try {
        result = sh::run_experiment(cfg, nworkers);
    } catch (const sh::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const sh::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }

    try {
        sh::write_outputs(cfg.out, sh::experiment_tag(cfg.experiment), result.rows, result.metadata);
    } catch (const sh::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    }

    if (cfg.experiment == sh::Experiment::SelfTest) {
        for (const auto& r : result.rows) {
            std::cout << (r.quantity == "pass" ? "PASS " : "FAIL ") << r.density;
            if (!r.error.empty()) std::cout << "  (" << r.error << ")";
            std::cout << '\n';
        }
    }
    long errors = result.metadata.value("error_rows", 0L);
    std::cout << "wrote " << result.rows.size() << " rows to " << cfg.out << "/"
              << sh::experiment_tag(cfg.experiment) << ".csv";
    if (errors > 0) std::cout << " (" << errors << " error rows)";
    std::cout << '\n';
    return result.failed ? kNumerical : kOk;
}
