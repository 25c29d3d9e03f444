#include "shrinkage/harness/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <numeric>
#include <thread>

#include "shrinkage/errors.hpp"
#include "shrinkage/gaussian.hpp"
#include "shrinkage/harness/parallel.hpp"
#include "shrinkage/harness/selftest.hpp"
#include "shrinkage/marginals.hpp"
#include "shrinkage/predictive.hpp"
#include "shrinkage/regression.hpp"
#include "shrinkage/risk.hpp"
#include "shrinkage/rng.hpp"

namespace shrinkage::harness {

using nlohmann::json;

namespace {

enum Salt : std::uint64_t {
    kRiskCurveSalt = 0x11,
    kCompareSalt = 0x12,
    kFitLinesSalt = 0x13,
    kPredictiveSalt = 0x14,
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string vector_label(const VectorXd& v) {
    std::string s = "x=(";
    for (long i = 0; i < v.size(); ++i) s += (i ? ";" : "") + fmt(v(i));
    return s + ")";
}

struct Stats {
    double mean = kMissing;
    double se = kMissing;
};

Stats mean_se(const std::vector<double>& v) {
    if (v.size() < 2) return {v.empty() ? kMissing : v[0], kMissing};
    const RiskEstimate e = summarize(v, RiskQuantity::Risk);
    return {e.mean, e.std_error};
}

VectorXd unit(long d) {
    VectorXd e = VectorXd::Zero(d);
    e(0) = 1.0;
    return e;
}

// ---------------------------------------------------------------- risk sweeps

// Per-draw KL risk of each density and the improvement over the flat-prior
// predictive, all on one (Sigma, SigmaTilde, eps) draw. Stein-type
// predictives use R(pi) - R(pi_I) = phi(mu, Sigma) - phi(mu, Sigma_w) with the
// same eps for y and w.
struct RiskSweep {
    // [density][point][rep]
    std::vector<std::vector<std::vector<double>>> risk;
    std::vector<std::vector<std::vector<double>>> improvement;
    // [point][rep]; empty when fine
    std::vector<std::vector<std::string>> errors;
};

RiskSweep run_risk_sweep(const ExperimentConfig& cfg, long d, std::uint64_t salt, unsigned workers) {
    const std::size_t nk = cfg.priors.size();
    const std::size_t nb = cfg.beta_norms.size();
    const std::size_t reps = static_cast<std::size_t>(cfg.reps);
    RiskSweep out;
    out.risk.assign(nk, std::vector<std::vector<double>>(nb, std::vector<double>(reps, kMissing)));
    out.improvement = out.risk;
    out.errors.assign(nb, std::vector<std::string>(reps));

    parallel_for(reps, workers, [&](std::size_t rep) {
        try {
            Rng rng = seed_substream(cfg.seed, {salt, static_cast<std::uint64_t>(d), rep});
            const MatrixXd x = sample_design(d, cfg.p, cfg.design, rng);
            const MatrixXd xt = sample_design(d, cfg.p_tilde, cfg.design, rng);
            std::vector<VectorXd> eps;
            for (long j = 0; j < cfg.inner_n; ++j) eps.push_back(rng.normal_vector(d));

            const ReducedTraining train = reduce({x, VectorXd::Zero(cfg.p), cfg.sigma2});
            const ReducedFuture future = reduce_future({xt, cfg.sigma2_tilde});
            const SpdMatrix& sigma = train.sigma;
            const PsdMatrix& sigma_tilde = future.sigma_tilde;
            const SpdMatrix sigma_w = combined_covariance(sigma, sigma_tilde);
            const MatrixXd total = sigma.entries() + sigma_tilde.entries();
            const MatrixXd gram = symmetrized(x * x.transpose());
            const PriorContext ctx{&sigma, &gram};

            std::vector<PredictiveSpec> specs;
            std::vector<std::optional<MarginalEvaluator>> at_sigma(nk), at_w(nk);
            for (std::size_t k = 0; k < nk; ++k) {
                specs.push_back(make_predictive(cfg.priors[k], d, ctx));
                if (!specs[k].is_gaussian()) {
                    at_sigma[k].emplace(*specs[k].prior, sigma);
                    at_w[k].emplace(*specs[k].prior, sigma_w);
                }
            }

            for (std::size_t b = 0; b < nb; ++b) {
                try {
                    const VectorXd mu = cfg.beta_norms[b] * unit(d);
                    std::vector<double> risk_sum(nk, 0.0), gain_sum(nk, 0.0);
                    for (const VectorXd& e : eps) {
                        const VectorXd y = mu + sigma.sqrt() * e;
                        const double kl_flat = gaussian_kl(mu, sigma_tilde, y, total);
                        for (std::size_t k = 0; k < nk; ++k) {
                            if (specs[k].is_gaussian()) {
                                const double kl =
                                    gaussian_predictive_kl(specs[k], mu, y, sigma, sigma_tilde);
                                risk_sum[k] += kl;
                                gain_sum[k] += kl_flat - kl;
                            } else {
                                const VectorXd w = mu + sigma_w.sqrt() * e;
                                const double delta =
                                    at_sigma[k]->log_marginal(y) - at_w[k]->log_marginal(w);
                                risk_sum[k] += kl_flat + delta;
                                gain_sum[k] -= delta;
                            }
                        }
                    }
                    const double n = static_cast<double>(eps.size());
                    for (std::size_t k = 0; k < nk; ++k) {
                        out.risk[k][b][rep] = risk_sum[k] / n;
                        out.improvement[k][b][rep] = gain_sum[k] / n;
                    }
                } catch (const std::exception& ex) {
                    out.errors[b][rep] = ex.what();
                }
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& ex) {
            for (std::size_t b = 0; b < nb; ++b) out.errors[b][rep] = ex.what();
        }
    });
    return out;
}

void risk_rows(const ExperimentConfig& cfg, bool improvement, unsigned workers,
               std::vector<ResultRow>& rows) {
    const std::string tag = experiment_tag(cfg.experiment);
    const std::uint64_t salt = improvement ? kRiskCurveSalt : kCompareSalt;
    for (long d : cfg.dims) {
        const RiskSweep sweep = run_risk_sweep(cfg, d, salt, workers);
        for (std::size_t b = 0; b < cfg.beta_norms.size(); ++b) {
            std::string error;
            for (const auto& e : sweep.errors[b]) {
                if (!e.empty()) {
                    error = e;
                    break;
                }
            }
            for (std::size_t k = 0; k < cfg.priors.size(); ++k) {
                ResultRow r;
                r.tag = tag;
                r.d = d;
                r.beta_norm = cfg.beta_norms[b];
                r.density = cfg.priors[k].display_name();
                r.seed = cfg.seed;
                r.quantity = improvement ? "risk_improvement" : "risk";
                r.n = cfg.reps;
                if (error.empty()) {
                    const auto& v = improvement ? sweep.improvement[k][b] : sweep.risk[k][b];
                    const Stats s = mean_se(v);
                    r.estimate = s.mean;
                    r.se = s.se;
                } else {
                    r.error = error;
                }
                rows.push_back(std::move(r));
            }
        }
    }
}

// ------------------------------------------------------------ regression fits

VectorXd true_beta(const ExperimentConfig& cfg) {
    const long d = cfg.dims[0];
    VectorXd beta = cfg.beta ? *cfg.beta : unit(d);
    if (!cfg.intercept) return beta;
    VectorXd out(d + 1);
    out << beta, cfg.beta0;
    return out;
}

struct TrainingDraw {
    RegressionData data;
    ReducedTraining reduced;
    MatrixXd gram;
};

TrainingDraw draw_training(const ExperimentConfig& cfg, const VectorXd& beta, Rng& rng) {
    MatrixXd x = sample_design(cfg.dims[0], cfg.p, cfg.design, rng);
    if (cfg.intercept) x = with_intercept(x);
    const VectorXd y = x.transpose() * beta + std::sqrt(cfg.sigma2) * rng.normal_vector(cfg.p);
    RegressionData data{x, y, cfg.sigma2};
    ReducedTraining reduced = reduce(data);
    MatrixXd gram = symmetrized(x * x.transpose());
    return TrainingDraw{std::move(data), std::move(reduced), std::move(gram)};
}

void fit_lines_rows(const ExperimentConfig& cfg, unsigned workers, std::vector<ResultRow>& rows) {
    const VectorXd beta = true_beta(cfg);
    const long dm = beta.size();
    const std::size_t nk = cfg.priors.size();
    const std::size_t ns = static_cast<std::size_t>(cfg.n_seeds);
    // [seed][density] -> coefficients, or an error
    std::vector<std::vector<VectorXd>> coef(ns, std::vector<VectorXd>(nk));
    std::vector<std::vector<std::string>> errors(ns, std::vector<std::string>(nk));

    parallel_for(ns, workers, [&](std::size_t s) {
        try {
            Rng rng = seed_substream(cfg.seed, {kFitLinesSalt, s});
            const TrainingDraw t = draw_training(cfg, beta, rng);
            const PriorContext ctx{&t.reduced.sigma, &t.gram};
            for (std::size_t k = 0; k < nk; ++k) {
                try {
                    const PredictiveSpec spec = make_predictive(cfg.priors[k], dm, ctx);
                    coef[s][k] = posterior_mean(*spec.prior, t.reduced.y1, t.reduced.sigma);
                } catch (const ConfigError&) {
                    throw;
                } catch (const std::exception& ex) {
                    errors[s][k] = ex.what();
                }
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& ex) {
            for (std::size_t k = 0; k < nk; ++k) errors[s][k] = ex.what();
        }
    });

    const std::string tag = experiment_tag(cfg.experiment);
    auto row = [&](std::size_t k, const std::string& point, const std::string& quantity) {
        ResultRow r;
        r.tag = tag;
        r.d = dm;
        r.beta_norm = beta.norm();
        r.density = cfg.priors[k].display_name();
        r.seed = cfg.seed;
        r.point = point;
        r.quantity = quantity;
        return r;
    };
    auto intercept_of = [&](const VectorXd& c) { return cfg.intercept ? c(dm - 1) : 0.0; };

    for (std::size_t s = 0; s < ns; ++s) {
        const std::string point = "seed=" + std::to_string(s);
        for (std::size_t k = 0; k < nk; ++k) {
            std::vector<std::pair<std::string, double>> values;
            if (errors[s][k].empty()) {
                values.emplace_back("slope", coef[s][k](0));
                if (cfg.intercept) values.emplace_back("intercept", intercept_of(coef[s][k]));
            } else {
                values.emplace_back("slope", kMissing);
            }
            for (const auto& [q, v] : values) {
                ResultRow r = row(k, point, q);
                r.estimate = v;
                r.se = 0.0;
                r.n = 1;
                r.error = errors[s][k];
                rows.push_back(std::move(r));
            }
            if (!errors[s][k].empty()) continue;
            for (double xv : cfg.x_grid) {
                ResultRow r = row(k, point + ";x=" + fmt(xv), "line");
                r.estimate = xv * coef[s][k](0) + intercept_of(coef[s][k]);
                r.se = 0.0;
                r.n = 1;
                rows.push_back(std::move(r));
            }
        }
    }

    // Across seeds.
    for (std::size_t k = 0; k < nk; ++k) {
        std::vector<double> slopes, intercepts;
        long slope_shrunk = 0, intercept_shrunk = 0, paired = 0;
        for (std::size_t s = 0; s < ns; ++s) {
            if (!errors[s][k].empty()) continue;
            slopes.push_back(coef[s][k](0));
            intercepts.push_back(intercept_of(coef[s][k]));
            if (k > 0 && errors[s][0].empty()) {
                ++paired;
                if (std::abs(coef[s][k](0)) < std::abs(coef[s][0](0))) ++slope_shrunk;
                if (std::abs(intercept_of(coef[s][k])) < std::abs(intercept_of(coef[s][0]))) {
                    ++intercept_shrunk;
                }
            }
        }
        auto add = [&](const std::string& q, const std::vector<double>& v) {
            ResultRow r = row(k, "all", q);
            const Stats st = mean_se(v);
            r.estimate = st.mean;
            r.se = st.se;
            r.n = static_cast<long>(v.size());
            if (v.empty()) r.error = "no successful seeds";
            rows.push_back(std::move(r));
        };
        add("slope", slopes);
        if (cfg.intercept) add("intercept", intercepts);
        if (k > 0) {
            ResultRow r = row(k, "all", "slope_shrunk_seeds");
            r.estimate = static_cast<double>(slope_shrunk);
            r.se = 0.0;
            r.n = paired;
            rows.push_back(r);
            if (cfg.intercept) {
                r.quantity = "intercept_shrunk_seeds";
                r.estimate = static_cast<double>(intercept_shrunk);
                rows.push_back(r);
            }
        }
    }
}

void predictive_cdf_rows(const ExperimentConfig& cfg, unsigned workers,
                         std::vector<ResultRow>& rows) {
    const VectorXd beta = true_beta(cfg);
    const long dm = beta.size();
    VectorXd x_future = cfg.x_tilde ? *cfg.x_tilde : unit(cfg.dims[0]);
    if (cfg.intercept) {
        VectorXd ext(dm);
        ext << x_future, 1.0;
        x_future = ext;
    }
    const std::size_t nk = cfg.priors.size();
    const std::size_t ns = static_cast<std::size_t>(cfg.n_seeds);

    struct Cell {
        std::vector<double> draws;
        double exact_mean = kMissing;
        double acceptance = kMissing;
        std::string error;
    };
    std::vector<Cell> cells(ns * nk);

    parallel_for(ns * nk, workers, [&](std::size_t task) {
        const std::size_t s = task / nk;
        const std::size_t k = task % nk;
        Cell& cell = cells[task];
        try {
            Rng design_rng = seed_substream(cfg.seed, {kPredictiveSalt, s, 0});
            const TrainingDraw t = draw_training(cfg, beta, design_rng);
            const ReducedFuture future = reduce_future({MatrixXd(x_future), cfg.sigma2_tilde});
            const PriorContext ctx{&t.reduced.sigma, &t.gram};
            const PredictiveSpec spec = make_predictive(cfg.priors[k], dm, ctx);
            const PredictiveDensity pd(t.reduced.y1, t.reduced.sigma, future.sigma_tilde, *spec.prior);
            Rng rng = seed_substream(cfg.seed, {kPredictiveSalt, s, k + 1});
            const PredictiveSample sample = predictive_sample(pd, cfg.mc_n, rng);
            cell.draws.reserve(sample.draws.size());
            // The statistic is x~ y~ / |x~|^2, so x~^T maps it back to y~.
            for (const VectorXd& v : sample.draws) cell.draws.push_back(x_future.dot(v));
            cell.exact_mean = x_future.dot(pd.mean());
            cell.acceptance = sample.acceptance_rate;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& ex) {
            cell.error = ex.what();
        }
    });

    const std::string tag = experiment_tag(cfg.experiment);
    auto row = [&](std::size_t k, const std::string& point, const std::string& quantity) {
        ResultRow r;
        r.tag = tag;
        r.d = dm;
        r.beta_norm = beta.norm();
        r.density = cfg.priors[k].display_name();
        r.seed = cfg.seed;
        r.point = point;
        r.quantity = quantity;
        return r;
    };

    std::vector<std::vector<double>> means(nk, std::vector<double>(ns, kMissing));
    for (std::size_t s = 0; s < ns; ++s) {
        const std::string point = "seed=" + std::to_string(s);
        for (std::size_t k = 0; k < nk; ++k) {
            const Cell& c = cells[s * nk + k];
            if (!c.error.empty()) {
                ResultRow r = row(k, point, "sample_mean");
                r.error = c.error;
                rows.push_back(std::move(r));
                continue;
            }
            const Stats st = mean_se(c.draws);
            means[k][s] = st.mean;
            ResultRow r = row(k, point, "sample_mean");
            r.estimate = st.mean;
            r.se = st.se;
            r.n = static_cast<long>(c.draws.size());
            rows.push_back(r);
            r.quantity = "exact_mean";
            r.estimate = c.exact_mean;
            r.se = 0.0;
            rows.push_back(r);
            r.quantity = "acceptance_rate";
            r.estimate = c.acceptance;
            rows.push_back(r);
            const double n = static_cast<double>(c.draws.size());
            for (double g : cfg.cdf_grid) {
                const double below = static_cast<double>(
                    std::count_if(c.draws.begin(), c.draws.end(), [&](double v) { return v <= g; }));
                ResultRow cr = row(k, point + ";y=" + fmt(g), "cdf");
                cr.estimate = below / n;
                cr.se = std::sqrt(cr.estimate * (1.0 - cr.estimate) / n);
                cr.n = c.draws.size();
                rows.push_back(std::move(cr));
            }
        }
    }

    for (std::size_t k = 0; k < nk; ++k) {
        std::vector<double> ok, gap;
        for (std::size_t s = 0; s < ns; ++s) {
            if (std::isnan(means[k][s])) continue;
            ok.push_back(means[k][s]);
            if (k > 0 && !std::isnan(means[0][s])) gap.push_back(means[0][s] - means[k][s]);
        }
        auto add = [&](const std::string& q, const std::vector<double>& v) {
            ResultRow r = row(k, "all", q);
            const Stats st = mean_se(v);
            r.estimate = st.mean;
            r.se = st.se;
            r.n = static_cast<long>(v.size());
            if (v.empty()) r.error = "no successful seeds";
            rows.push_back(std::move(r));
        };
        add("sample_mean", ok);
        if (k > 0) add("sample_mean_gap", gap);
    }
}

void astar_surface_rows(const ExperimentConfig& cfg, unsigned workers,
                        std::vector<ResultRow>& rows) {
    RegressionData data;
    if (cfg.train_csv.empty()) {
        const BuiltinTraining b = astar_training_set();
        data = {b.x, b.y, cfg.sigma2};
    } else {
        CsvDesign csv;
        try {
            csv = read_design_csv(cfg.train_csv, true);
        } catch (const std::exception& ex) {
            throw IoError(ex.what());
        }
        data = {csv.x, csv.y, cfg.sigma2};
    }
    const long d = data.x.rows();
    std::vector<VectorXd> points;
    if (!cfg.future_csv.empty()) {
        CsvDesign csv;
        try {
            csv = read_design_csv(cfg.future_csv, false);
        } catch (const std::exception& ex) {
            throw IoError(ex.what());
        }
        if (csv.x.rows() != d) throw ConfigError("future_csv dimension differs from training data");
        for (long j = 0; j < csv.x.cols(); ++j) points.push_back(csv.x.col(j));
    } else {
        if (d < 2) throw ConfigError("grid_axis needs d >= 2");
        for (double a : cfg.grid_axis) {
            for (double b : cfg.grid_axis) {
                VectorXd v = VectorXd::Zero(d);
                v(0) = a;
                v(1) = b;
                points.push_back(v);
            }
        }
    }

    const ReducedTraining train = reduce(data);
    const bool plus_train = cfg.future_design == "point_plus_train";
    struct Cell {
        double prediction = kMissing;
        long rank = 0;
        std::string error;
    };
    std::vector<Cell> cells(points.size());
    parallel_for(points.size(), workers, [&](std::size_t i) {
        const VectorXd& xt = points[i];
        try {
            MatrixXd design(d, plus_train ? data.x.cols() + 1 : 1);
            design.col(0) = xt;
            if (plus_train) design.rightCols(data.x.cols()) = data.x;
            const AstarPrior ap = astar_regression_prior(data, {design, cfg.sigma2_tilde});
            cells[i].prediction = xt.dot(posterior_mean(ap.prior, train.y1, train.sigma));
            cells[i].rank = ap.astar.rank;
        } catch (const std::exception& ex) {
            cells[i].error = ex.what();
        }
    });

    for (std::size_t i = 0; i < points.size(); ++i) {
        ResultRow r;
        r.tag = experiment_tag(cfg.experiment);
        r.d = d;
        r.density = "astar_stein";
        r.seed = cfg.seed;
        r.point = vector_label(points[i]);
        r.n = 1;
        const double mle = points[i].dot(train.y1);
        if (!cells[i].error.empty()) {
            r.quantity = "prediction";
            r.error = cells[i].error;
            rows.push_back(r);
        } else {
            r.se = 0.0;
            r.quantity = "prediction";
            r.estimate = cells[i].prediction;
            rows.push_back(r);
            r.quantity = "shrinkage";
            r.estimate = mle - cells[i].prediction;
            rows.push_back(r);
            r.quantity = "astar_rank";
            r.estimate = static_cast<double>(cells[i].rank);
            rows.push_back(r);
        }
        r.density = "uniform";
        r.quantity = "prediction";
        r.estimate = mle;
        r.se = 0.0;
        r.error.clear();
        rows.push_back(r);
    }
}

void selftest_rows(const ExperimentConfig& cfg, unsigned workers, ExperimentOutput& out) {
    const std::vector<CheckResult> checks = run_selftest(cfg.seed, workers);
    json list = json::array();
    for (const auto& c : checks) {
        ResultRow r;
        r.tag = "selftest";
        r.density = c.name;
        r.estimate = c.statistic;
        r.se = c.threshold;
        r.n = c.n;
        r.seed = cfg.seed;
        r.quantity = c.passed ? "pass" : "fail";
        r.error = c.passed ? "" : c.detail;
        out.rows.push_back(std::move(r));
        out.failed = out.failed || !c.passed;
        list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    out.metadata["suite"] = list;
}

json open_defaults(const ExperimentConfig& cfg) {
    json j;
    j["sigma2"] = cfg.sigma2;
    j["sigma2_tilde"] = cfg.sigma2_tilde;
    switch (cfg.experiment) {
        case Experiment::RiskCurve:
        case Experiment::CompareDensities:
            j["design_reading"] = "i.i.d. entries for X (d x p) and X~ (d x p_tilde)";
            j["beta_direction"] = "e1";
            j["inner_estimator"] =
                "closed-form KL for Gaussian predictives; phi(mu,Sigma)-phi(mu,Sigma_w) "
                "with shared draws for Stein-type priors";
            j["ridge_lambda"] = "prior precision on beta; ridge penalty equals lambda * sigma2";
            break;
        case Experiment::FitLines:
        case Experiment::PredictiveCdf:
            j["intercept"] = cfg.intercept;
            j["beta0"] = cfg.beta0;
            j["x_tilde"] = "e1 unless configured";
            j["seed_summary"] = "per-seed values plus the mean over seeds with its standard error";
            break;
        case Experiment::AstarSurface:
            j["future_design"] = cfg.future_design;
            j["training_set"] = cfg.train_csv.empty() ? "built-in" : cfg.train_csv;
            break;
        case Experiment::SelfTest:
            break;
    }
    j["rescaled_stein_sigma_star"] = "train_cov = sigma2 (X X^T)^{-1} unless configured";
    j["residual_factor"] = "prior-independent residual density of y~ omitted";
    return j;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

BuiltinTraining astar_training_set() {
    const double r3 = std::sqrt(3.0) / 2.0;
    BuiltinTraining b;
    b.x.resize(3, 3);
    b.x << r3, r3, 0.0,
           0.5, -0.5, 0.0,
           0.0, 0.0, 1.0;
    b.y.resize(3);
    b.y << r3 + 0.5, r3 - 0.5, 0.0;
    return b;
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
    if (o.seed) cfg.seed = *o.seed;
    if (o.out) cfg.out = *o.out;
    if (o.paper_scale) cfg.reps = kPaperScaleReps;
    if (o.intercept) cfg.intercept = true;
    validate(cfg);
}

unsigned resolve_workers(std::optional<long> cli) {
    long n = 0;
    if (cli) {
        n = *cli;
    } else if (const char* env = std::getenv("SHRINKAGE_LAB_WORKERS"); env && *env) {
        char* end = nullptr;
        n = std::strtol(env, &end, 10);
        if (*end != '\0') throw ConfigError("SHRINKAGE_LAB_WORKERS must be an integer");
    } else {
        n = std::max(1u, std::thread::hardware_concurrency());
    }
    if (n < 1 || n > 4096) throw ConfigError("worker count must be between 1 and 4096");
    return static_cast<unsigned>(n);
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg, unsigned workers) {
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();
    ExperimentOutput out;
    out.metadata["library"] = "shrinkage-lab";
    out.metadata["version"] = kVersion;
    out.metadata["experiment"] = experiment_tag(cfg.experiment);
    out.metadata["started_utc"] = utc_now();
    out.metadata["workers"] = workers;
    out.metadata["config"] = cfg.to_json();
    out.metadata["config_keys_given"] = cfg.explicit_keys;
    out.metadata["defaults_used"] = open_defaults(cfg);

    switch (cfg.experiment) {
        case Experiment::RiskCurve: risk_rows(cfg, true, workers, out.rows); break;
        case Experiment::CompareDensities: risk_rows(cfg, false, workers, out.rows); break;
        case Experiment::FitLines: fit_lines_rows(cfg, workers, out.rows); break;
        case Experiment::PredictiveCdf: predictive_cdf_rows(cfg, workers, out.rows); break;
        case Experiment::AstarSurface: astar_surface_rows(cfg, workers, out.rows); break;
        case Experiment::SelfTest: selftest_rows(cfg, workers, out); break;
    }

    long error_rows = 0;
    for (const auto& r : out.rows) error_rows += r.error.empty() ? 0 : 1;
    out.metadata["rows"] = out.rows.size();
    out.metadata["error_rows"] = error_rows;
    out.metadata["csv_columns"] = kCsvHeader;
    out.metadata["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace shrinkage::harness
