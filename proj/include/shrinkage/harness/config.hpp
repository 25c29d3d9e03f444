#ifndef SHRINKAGE_HARNESS_CONFIG_HPP
#define SHRINKAGE_HARNESS_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "shrinkage/linalg.hpp"
#include "shrinkage/priors.hpp"
#include "shrinkage/risk.hpp"

namespace shrinkage::harness {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Experiment { FitLines, PredictiveCdf, RiskCurve, CompareDensities, AstarSurface, SelfTest };

Experiment parse_experiment(const std::string& tag);
std::string experiment_tag(Experiment e);

enum class SigmaStar { TrainCov, TrainGram, Explicit };

// One entry of the "priors" list.
struct PriorSpec {
    std::string type;  // uniform | stein | rescaled_stein | ridge | plugin
    double lambda = 0.0;
    SigmaStar sigma_star = SigmaStar::TrainCov;
    MatrixXd sigma_star_matrix;
    std::string label;

    bool is_plugin() const { return type == "plugin"; }
    bool needs_stein_dim() const { return type == "stein" || type == "rescaled_stein"; }
    std::string display_name() const;
    nlohmann::json to_json() const;
};

// Training quantities a prior may depend on.
struct PriorContext {
    const SpdMatrix* train_cov = nullptr;  // sigma2 (X X^T)^{-1}
    const MatrixXd* train_gram = nullptr;  // X X^T
};

PredictiveSpec make_predictive(const PriorSpec& spec, long d, const PriorContext& ctx);

struct ExperimentConfig {
    Experiment experiment = Experiment::RiskCurve;
    std::uint64_t seed = 1;
    std::string out = "results";

    std::vector<long> dims;
    long p = 10;
    long p_tilde = 10;
    std::optional<VectorXd> beta;
    double beta0 = 1.0;
    std::vector<double> beta_norms;
    DesignDistribution design = DesignDistribution::StdNormalEntries;
    double sigma2 = 1.0;
    double sigma2_tilde = 1.0;
    std::vector<PriorSpec> priors;

    long reps = 1000;
    long inner_n = 10;
    long mc_n = 10000;
    long n_seeds = 20;
    bool intercept = false;

    std::vector<double> x_grid;
    std::optional<VectorXd> x_tilde;
    std::vector<double> cdf_grid;
    std::vector<double> grid_axis;
    std::string future_design = "point_plus_train";
    std::string train_csv;
    std::string future_csv;

    // Which keys came from the file (the rest are defaults).
    std::vector<std::string> explicit_keys;

    nlohmann::json to_json() const;
};

// Parses a config document for the given experiment, filling defaults.
// Throws ConfigError on unknown keys, wrong types or invalid values.
ExperimentConfig parse_config(const nlohmann::json& doc, Experiment experiment);
ExperimentConfig load_config(const std::string& path, Experiment experiment);

// Checks the invariants after command-line overrides have been applied.
void validate(const ExperimentConfig& cfg);

}  // namespace shrinkage::harness

#endif
