#ifndef SHRINKAGE_HARNESS_EXPERIMENTS_HPP
#define SHRINKAGE_HARNESS_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shrinkage/harness/config.hpp"
#include "shrinkage/harness/results.hpp"

namespace shrinkage::harness {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr long kPaperScaleReps = 10000;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool paper_scale = false;
    bool intercept = false;
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

// --workers wins, then SHRINKAGE_LAB_WORKERS, then the hardware thread count.
// Throws ConfigError on a non-positive or malformed value.
unsigned resolve_workers(std::optional<long> cli);

struct ExperimentOutput {
    std::vector<ResultRow> rows;
    nlohmann::json metadata;
    // selftest only: some check failed.
    bool failed = false;
};

// Results do not depend on the worker count.
ExperimentOutput run_experiment(const ExperimentConfig& cfg, unsigned workers);

// Built-in astar-surface training set: three samples in R^3 whose least-squares fit is
// (1, 1, 0).
struct BuiltinTraining {
    MatrixXd x;
    VectorXd y;
};
BuiltinTraining astar_training_set();

}  // namespace shrinkage::harness

#endif
