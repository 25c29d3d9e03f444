#include "shrinkage/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace shrinkage::harness {

using nlohmann::json;

namespace {

const std::set<std::string> kConfigKeys = {
    "experiment", "seed",     "out",       "d",          "dims",        "p",
    "p_tilde",    "beta",     "beta0",     "beta_norms", "design",      "sigma2",
    "sigma2_tilde", "priors", "lambdas",   "reps",       "inner_n",     "mc_n",
    "n_seeds",    "intercept", "x_grid",   "x_tilde",    "cdf_grid",    "grid_axis",
    "future_design", "train_csv", "future_csv"};

const std::set<std::string> kPriorKeys = {"type", "lambda", "sigma_star", "label"};

double number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("'" + key + "' must be finite");
    return x;
}

long integer(const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
    return v.get<long>();
}

std::vector<double> number_list(const json& v, const std::string& key) {
    if (!v.is_array()) throw ConfigError("'" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(number(e, key));
    return out;
}

VectorXd vector_of(const json& v, const std::string& key) {
    const std::vector<double> xs = number_list(v, key);
    if (xs.empty()) throw ConfigError("'" + key + "' must be nonempty");
    return Eigen::Map<const VectorXd>(xs.data(), static_cast<long>(xs.size()));
}

std::string text(const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return out;
}

PriorSpec parse_prior(const json& v) {
    if (!v.is_object()) throw ConfigError("each prior must be an object");
    for (const auto& [k, _] : v.items()) {
        if (!kPriorKeys.contains(k)) throw ConfigError("unknown prior key '" + k + "'");
    }
    if (!v.contains("type")) throw ConfigError("prior is missing 'type'");
    PriorSpec spec;
    spec.type = text(v.at("type"), "type");
    static const std::set<std::string> types = {"uniform", "stein", "rescaled_stein", "ridge", "plugin"};
    if (!types.contains(spec.type)) throw ConfigError("unknown prior type '" + spec.type + "'");
    if (v.contains("lambda")) {
        if (spec.type != "ridge") throw ConfigError("'lambda' only applies to ridge priors");
        spec.lambda = number(v.at("lambda"), "lambda");
    }
    if (spec.type == "ridge") {
        if (!v.contains("lambda")) throw ConfigError("ridge prior needs 'lambda'");
        if (!(spec.lambda > 0.0)) throw ConfigError("ridge 'lambda' must be positive");
    }
    if (v.contains("sigma_star")) {
        if (spec.type != "rescaled_stein") {
            throw ConfigError("'sigma_star' only applies to rescaled_stein priors");
        }
        const json& s = v.at("sigma_star");
        if (s.is_string()) {
            const std::string tag = s.get<std::string>();
            if (tag == "train_cov") {
                spec.sigma_star = SigmaStar::TrainCov;
            } else if (tag == "train_gram") {
                spec.sigma_star = SigmaStar::TrainGram;
            } else {
                throw ConfigError("'sigma_star' must be train_cov, train_gram or a matrix");
            }
        } else if (s.is_array() && !s.empty()) {
            const long n = static_cast<long>(s.size());
            spec.sigma_star = SigmaStar::Explicit;
            spec.sigma_star_matrix.resize(n, n);
            for (long i = 0; i < n; ++i) {
                const std::vector<double> row = number_list(s[static_cast<std::size_t>(i)], "sigma_star");
                if (static_cast<long>(row.size()) != n) throw ConfigError("'sigma_star' must be square");
                for (long j = 0; j < n; ++j) spec.sigma_star_matrix(i, j) = row[static_cast<std::size_t>(j)];
            }
        } else {
            throw ConfigError("'sigma_star' must be train_cov, train_gram or a matrix");
        }
    }
    if (v.contains("label")) spec.label = text(v.at("label"), "label");
    return spec;
}

PriorSpec simple_prior(const std::string& type, double lambda = 0.0) {
    PriorSpec s;
    s.type = type;
    s.lambda = lambda;
    return s;
}

void apply_defaults(ExperimentConfig& c) {
    switch (c.experiment) {
        case Experiment::RiskCurve:
            c.dims = {3, 5, 7, 9};
            c.beta_norms = {0.0, 0.5, 1.0, 1.5, 2.0};
            c.priors = {simple_prior("rescaled_stein")};
            break;
        case Experiment::CompareDensities:
            c.dims = {5};
            c.beta_norms = {0.0, 0.5, 1.0, 1.5, 2.0};
            c.priors = {simple_prior("uniform"), simple_prior("rescaled_stein"),
                        simple_prior("ridge", 10.0), simple_prior("ridge", std::sqrt(10.0)),
                        simple_prior("plugin")};
            break;
        case Experiment::FitLines:
            c.dims = {5};
            c.design = DesignDistribution::UniformPm1;
            c.priors = {simple_prior("uniform"), simple_prior("rescaled_stein")};
            c.x_grid = {0.0, 0.5, 1.0, 1.5, 2.0};
            break;
        case Experiment::PredictiveCdf:
            c.dims = {5};
            c.design = DesignDistribution::UniformPm1;
            c.sigma2 = 10.0;
            c.sigma2_tilde = 10.0;
            c.priors = {simple_prior("uniform"), simple_prior("rescaled_stein")};
            c.cdf_grid = linspace(-8.0, 10.0, 19);
            break;
        case Experiment::AstarSurface:
            c.dims = {3};
            c.grid_axis = linspace(-2.0, 2.0, 9);
            break;
        case Experiment::SelfTest:
            c.dims = {3};
            break;
    }
}

}  // namespace

Experiment parse_experiment(const std::string& tag) {
    if (tag == "fit-lines") return Experiment::FitLines;
    if (tag == "predictive-cdf") return Experiment::PredictiveCdf;
    if (tag == "risk-curve") return Experiment::RiskCurve;
    if (tag == "compare-densities") return Experiment::CompareDensities;
    if (tag == "astar-surface") return Experiment::AstarSurface;
    if (tag == "selftest") return Experiment::SelfTest;
    throw ConfigError("unknown experiment '" + tag + "'");
}

std::string experiment_tag(Experiment e) {
    switch (e) {
        case Experiment::FitLines: return "fit-lines";
        case Experiment::PredictiveCdf: return "predictive-cdf";
        case Experiment::RiskCurve: return "risk-curve";
        case Experiment::CompareDensities: return "compare-densities";
        case Experiment::AstarSurface: return "astar-surface";
        case Experiment::SelfTest: return "selftest";
    }
    return "unknown";
}

std::string PriorSpec::display_name() const {
    if (!label.empty()) return label;
    if (type == "ridge") {
        std::ostringstream os;
        os << "ridge(" << lambda << ")";
        return os.str();
    }
    if (type == "rescaled_stein") {
        switch (sigma_star) {
            case SigmaStar::TrainCov: return "rescaled_stein";
            case SigmaStar::TrainGram: return "rescaled_stein[gram]";
            case SigmaStar::Explicit: return "rescaled_stein[explicit]";
        }
    }
    return type;
}

json PriorSpec::to_json() const {
    json j = {{"type", type}};
    if (type == "ridge") j["lambda"] = lambda;
    if (type == "rescaled_stein") {
        if (sigma_star == SigmaStar::Explicit) {
            json rows = json::array();
            for (long i = 0; i < sigma_star_matrix.rows(); ++i) {
                json row = json::array();
                for (long k = 0; k < sigma_star_matrix.cols(); ++k) row.push_back(sigma_star_matrix(i, k));
                rows.push_back(row);
            }
            j["sigma_star"] = rows;
        } else {
            j["sigma_star"] = sigma_star == SigmaStar::TrainCov ? "train_cov" : "train_gram";
        }
    }
    if (!label.empty()) j["label"] = label;
    return j;
}

PredictiveSpec make_predictive(const PriorSpec& spec, long d, const PriorContext& ctx) {
    if (spec.type == "plugin") return PredictiveSpec::plugin();
    if (spec.type == "uniform") return PredictiveSpec::bayes(Prior::uniform(d));
    if (spec.type == "stein") return PredictiveSpec::bayes(Prior::stein(d));
    if (spec.type == "ridge") return PredictiveSpec::bayes(Prior::gaussian_ridge(d, spec.lambda));
    switch (spec.sigma_star) {
        case SigmaStar::TrainCov:
            if (!ctx.train_cov) throw ConfigError("sigma_star train_cov needs training data");
            return PredictiveSpec::bayes(Prior::rescaled_stein(*ctx.train_cov));
        case SigmaStar::TrainGram:
            if (!ctx.train_gram) throw ConfigError("sigma_star train_gram needs training data");
            return PredictiveSpec::bayes(
                Prior::rescaled_stein(SpdMatrix::from_symmetric_part(*ctx.train_gram)));
        case SigmaStar::Explicit:
            if (spec.sigma_star_matrix.rows() != d) {
                throw ConfigError("explicit sigma_star has the wrong dimension");
            }
            return PredictiveSpec::bayes(Prior::rescaled_stein(SpdMatrix(spec.sigma_star_matrix)));
    }
    throw ConfigError("unsupported prior");
}

ExperimentConfig parse_config(const json& doc, Experiment experiment) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    c.experiment = experiment;
    apply_defaults(c);
    for (const auto& [k, _] : doc.items()) {
        if (!kConfigKeys.contains(k)) throw ConfigError("unknown config key '" + k + "'");
        c.explicit_keys.push_back(k);
    }
    auto has = [&](const char* k) { return doc.contains(k); };

    if (has("experiment") && parse_experiment(text(doc["experiment"], "experiment")) != experiment) {
        throw ConfigError("config is for experiment '" + doc["experiment"].get<std::string>() +
                          "', not '" + experiment_tag(experiment) + "'");
    }
    if (has("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
        c.seed = doc["seed"].get<std::uint64_t>();
    }
    if (has("out")) c.out = text(doc["out"], "out");
    if (has("d") && has("dims")) throw ConfigError("give either 'd' or 'dims', not both");
    if (has("d")) c.dims = {integer(doc["d"], "d")};
    if (has("dims")) {
        if (!doc["dims"].is_array()) throw ConfigError("'dims' must be an array of integers");
        c.dims.clear();
        for (const auto& v : doc["dims"]) c.dims.push_back(integer(v, "dims"));
    }
    if (has("p")) c.p = integer(doc["p"], "p");
    if (has("p_tilde")) c.p_tilde = integer(doc["p_tilde"], "p_tilde");
    if (has("beta")) c.beta = vector_of(doc["beta"], "beta");
    if (has("beta0")) c.beta0 = number(doc["beta0"], "beta0");
    if (has("beta_norms")) c.beta_norms = number_list(doc["beta_norms"], "beta_norms");
    if (has("design")) {
        const std::string s = text(doc["design"], "design");
        if (s == "std_normal_entries") {
            c.design = DesignDistribution::StdNormalEntries;
        } else if (s == "uniform_pm1") {
            c.design = DesignDistribution::UniformPm1;
        } else {
            throw ConfigError("'design' must be std_normal_entries or uniform_pm1");
        }
    }
    if (has("sigma2")) c.sigma2 = number(doc["sigma2"], "sigma2");
    if (has("sigma2_tilde")) c.sigma2_tilde = number(doc["sigma2_tilde"], "sigma2_tilde");
    if (has("priors")) {
        if (!doc["priors"].is_array()) throw ConfigError("'priors' must be an array");
        c.priors.clear();
        for (const auto& v : doc["priors"]) c.priors.push_back(parse_prior(v));
    }
    if (has("lambdas")) {
        for (double l : number_list(doc["lambdas"], "lambdas")) {
            if (!(l > 0.0)) throw ConfigError("'lambdas' entries must be positive");
            c.priors.push_back(simple_prior("ridge", l));
        }
    }
    if (has("reps")) c.reps = integer(doc["reps"], "reps");
    if (has("inner_n")) c.inner_n = integer(doc["inner_n"], "inner_n");
    if (has("mc_n")) c.mc_n = integer(doc["mc_n"], "mc_n");
    if (has("n_seeds")) c.n_seeds = integer(doc["n_seeds"], "n_seeds");
    if (has("intercept")) {
        if (!doc["intercept"].is_boolean()) throw ConfigError("'intercept' must be a boolean");
        c.intercept = doc["intercept"].get<bool>();
    }
    if (has("x_grid")) c.x_grid = number_list(doc["x_grid"], "x_grid");
    if (has("x_tilde")) c.x_tilde = vector_of(doc["x_tilde"], "x_tilde");
    if (has("cdf_grid")) c.cdf_grid = number_list(doc["cdf_grid"], "cdf_grid");
    if (has("grid_axis")) c.grid_axis = number_list(doc["grid_axis"], "grid_axis");
    if (has("future_design")) c.future_design = text(doc["future_design"], "future_design");
    if (has("train_csv")) c.train_csv = text(doc["train_csv"], "train_csv");
    if (has("future_csv")) c.future_csv = text(doc["future_csv"], "future_csv");
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path, Experiment experiment) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return parse_config(doc, experiment);
}

void validate(const ExperimentConfig& c) {
    const Experiment e = c.experiment;
    if (e == Experiment::SelfTest) return;
    if (c.dims.empty()) throw ConfigError("'dims' must be nonempty");
    const bool single_dim = e == Experiment::FitLines || e == Experiment::PredictiveCdf ||
                            e == Experiment::AstarSurface;
    if (single_dim && c.dims.size() != 1) throw ConfigError("this experiment takes a single 'd'");
    if (c.intercept && !(e == Experiment::FitLines || e == Experiment::PredictiveCdf)) {
        throw ConfigError("intercept is supported for fit-lines and predictive-cdf only");
    }
    if (!(c.sigma2 > 0.0) || !(c.sigma2_tilde > 0.0)) {
        throw ConfigError("'sigma2' and 'sigma2_tilde' must be positive");
    }
    const long extra = c.intercept ? 1 : 0;
    for (long d : c.dims) {
        if (d < 1) throw ConfigError("dimensions must be positive");
        const long dm = d + extra;
        if (e != Experiment::AstarSurface && c.p < dm) {
            throw ConfigError("'p' must be at least the model dimension");
        }
        for (const auto& pr : c.priors) {
            if (pr.needs_stein_dim() && dm < 3) {
                throw ConfigError("Stein-type priors need model dimension >= 3");
            }
            if (pr.sigma_star == SigmaStar::Explicit && pr.type == "rescaled_stein" &&
                pr.sigma_star_matrix.rows() != dm) {
                throw ConfigError("explicit 'sigma_star' does not match the model dimension");
            }
        }
    }
    if (c.p_tilde < 1) throw ConfigError("'p_tilde' must be positive");

    if (e != Experiment::AstarSurface && c.priors.empty()) throw ConfigError("'priors' must be nonempty");
    std::set<std::string> names;
    for (const auto& pr : c.priors) {
        if (!names.insert(pr.display_name()).second) {
            throw ConfigError("duplicate prior '" + pr.display_name() + "'; set a 'label'");
        }
        if (pr.is_plugin() && (e == Experiment::FitLines || e == Experiment::PredictiveCdf)) {
            throw ConfigError("the plugin density is only available in risk experiments");
        }
    }

    if (e == Experiment::RiskCurve || e == Experiment::CompareDensities) {
        if (c.beta_norms.empty()) throw ConfigError("'beta_norms' must be nonempty");
        for (double b : c.beta_norms) {
            if (b < 0.0) throw ConfigError("'beta_norms' must be non-negative");
        }
        if (c.reps < 2) throw ConfigError("'reps' must be at least 2");
        if (c.inner_n < 1) throw ConfigError("'inner_n' must be positive");
    }
    if (e == Experiment::FitLines || e == Experiment::PredictiveCdf) {
        if (c.n_seeds < 2) throw ConfigError("'n_seeds' must be at least 2");
        if (c.beta && c.beta->size() != c.dims[0]) throw ConfigError("'beta' must have length d");
    }
    if (e == Experiment::FitLines && c.x_grid.empty()) throw ConfigError("'x_grid' must be nonempty");
    if (e == Experiment::PredictiveCdf) {
        if (c.mc_n < 2) throw ConfigError("'mc_n' must be at least 2");
        if (c.cdf_grid.empty()) throw ConfigError("'cdf_grid' must be nonempty");
        if (c.x_tilde && c.x_tilde->size() != c.dims[0]) throw ConfigError("'x_tilde' must have length d");
    }
    if (e == Experiment::AstarSurface) {
        if (c.future_design != "point_plus_train" && c.future_design != "point") {
            throw ConfigError("'future_design' must be point_plus_train or point");
        }
        if (c.future_csv.empty() && c.grid_axis.empty()) throw ConfigError("'grid_axis' must be nonempty");
        if (c.train_csv.empty() && c.dims[0] != 3) {
            throw ConfigError("the built-in astar-surface data set is three dimensional");
        }
        if (c.future_csv.empty() && c.dims[0] < 2) throw ConfigError("'grid_axis' needs d >= 2");
    }
}

json ExperimentConfig::to_json() const {
    json j;
    j["experiment"] = experiment_tag(experiment);
    j["seed"] = seed;
    j["out"] = out;
    j["dims"] = dims;
    j["p"] = p;
    j["p_tilde"] = p_tilde;
    if (beta) j["beta"] = std::vector<double>(beta->data(), beta->data() + beta->size());
    j["beta0"] = beta0;
    j["beta_norms"] = beta_norms;
    j["design"] = design == DesignDistribution::StdNormalEntries ? "std_normal_entries" : "uniform_pm1";
    j["sigma2"] = sigma2;
    j["sigma2_tilde"] = sigma2_tilde;
    j["priors"] = json::array();
    for (const auto& pr : priors) j["priors"].push_back(pr.to_json());
    j["reps"] = reps;
    j["inner_n"] = inner_n;
    j["mc_n"] = mc_n;
    j["n_seeds"] = n_seeds;
    j["intercept"] = intercept;
    j["x_grid"] = x_grid;
    if (x_tilde) j["x_tilde"] = std::vector<double>(x_tilde->data(), x_tilde->data() + x_tilde->size());
    j["cdf_grid"] = cdf_grid;
    j["grid_axis"] = grid_axis;
    j["future_design"] = future_design;
    if (!train_csv.empty()) j["train_csv"] = train_csv;
    if (!future_csv.empty()) j["future_csv"] = future_csv;
    return j;
}

}  // namespace shrinkage::harness
