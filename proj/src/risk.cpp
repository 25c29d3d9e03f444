#include "shrinkage/risk.hpp"

#include <cmath>

#include "shrinkage/errors.hpp"
#include "shrinkage/gaussian.hpp"
#include "shrinkage/predictive.hpp"

namespace shrinkage {

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

RiskEstimate summarize(std::span<const double> values, RiskQuantity quantity) {
    if (values.size() < 2) throw std::invalid_argument("summarize: need at least 2 values");
    const double n = static_cast<double>(values.size());
    const double mean = pairwise_sum(values) / n;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double r = values[i] - mean;
        sq[i] = r * r;
    }
    const double var = pairwise_sum(sq) / (n - 1.0);
    return RiskEstimate{mean, std::sqrt(var / n), static_cast<long>(values.size()), quantity};
}

RiskEstimate phi_estimate(const Prior& prior, const VectorXd& mu, const SpdMatrix& cov, long n,
                          Rng& rng) {
    require_same_dim(mu.size(), cov.dim(), "phi_estimate");
    if (n < 2) throw std::invalid_argument("phi_estimate: n must be >= 2");
    if (prior.is_constant()) return RiskEstimate{0.0, 0.0, n, RiskQuantity::Phi};
    const MarginalEvaluator ev(prior, cov);
    std::vector<double> values(static_cast<std::size_t>(n));
    for (auto& v : values) v = ev.log_marginal(mu + cov.sqrt() * rng.normal_vector(mu.size()));
    return summarize(values, RiskQuantity::Phi);
}

RiskEstimate phi_difference(const Prior& prior, const VectorXd& mu, const SpdMatrix& cov1,
                            const SpdMatrix& cov2, long n, Rng& rng) {
    require_same_dim(mu.size(), cov1.dim(), "phi_difference");
    require_same_dim(mu.size(), cov2.dim(), "phi_difference");
    if (n < 2) throw std::invalid_argument("phi_difference: n must be >= 2");
    if (prior.is_constant()) return RiskEstimate{0.0, 0.0, n, RiskQuantity::PhiDifference};
    const MarginalEvaluator ev1(prior, cov1);
    const MarginalEvaluator ev2(prior, cov2);
    std::vector<double> values(static_cast<std::size_t>(n));
    for (auto& v : values) {
        const VectorXd eps = rng.normal_vector(mu.size());
        v = ev1.log_marginal(mu + cov1.sqrt() * eps) - ev2.log_marginal(mu + cov2.sqrt() * eps);
    }
    return summarize(values, RiskQuantity::PhiDifference);
}

RiskEstimate risk_difference(const Prior& prior, const VectorXd& mu, const SpdMatrix& sigma,
                             const PsdMatrix& sigma_tilde, long n, Rng& rng) {
    RiskEstimate est =
        phi_difference(prior, mu, sigma, combined_covariance(sigma, sigma_tilde), n, rng);
    est.quantity = RiskQuantity::RiskDifference;
    return est;
}

bool PredictiveSpec::is_gaussian() const {
    return is_plugin() || prior->kind() == PriorKind::Uniform ||
           prior->kind() == PriorKind::GaussianRidge;
}

std::string PredictiveSpec::name() const { return is_plugin() ? "plugin" : prior->name(); }

double gaussian_predictive_kl(const PredictiveSpec& spec, const VectorXd& mu, const VectorXd& y,
                              const SpdMatrix& sigma, const PsdMatrix& sigma_tilde) {
    if (spec.is_plugin()) return gaussian_kl(mu, sigma_tilde, y, sigma_tilde.entries());
    switch (spec.prior->kind()) {
        case PriorKind::Uniform:
            return gaussian_kl(mu, sigma_tilde, y, MatrixXd(sigma.entries() + sigma_tilde.entries()));
        case PriorKind::GaussianRidge: {
            const long d = sigma.dim();
            const SpdMatrix post_prec = SpdMatrix::from_symmetric_part(
                sigma.inverse() + spec.prior->lambda() * MatrixXd::Identity(d, d));
            const MatrixXd& v = post_prec.inverse();
            const VectorXd m = v * (sigma.inverse() * y);
            return gaussian_kl(mu, sigma_tilde, m, MatrixXd(sigma_tilde.entries() + v));
        }
        default:
            throw std::invalid_argument("gaussian_predictive_kl: predictive is not Gaussian");
    }
}

namespace {

// Per-outer-draw KL values, one vector per spec, on shared draws.
std::vector<std::vector<double>> direct_risk_samples(std::span<const PredictiveSpec> specs,
                                                     const VectorXd& mu, const SpdMatrix& sigma,
                                                     const PsdMatrix& sigma_tilde, long n_outer,
                                                     long n_inner, Rng& rng) {
    require_same_dim(mu.size(), sigma.dim(), "direct_risk");
    require_same_dim(sigma_tilde.dim(), sigma.dim(), "direct_risk");
    if (n_outer < 2) throw std::invalid_argument("direct_risk: n_outer must be >= 2");
    bool inner = false;
    for (const auto& s : specs) inner = inner || !s.is_gaussian();
    if (inner && n_inner < 1) throw std::invalid_argument("direct_risk: n_inner must be >= 1");

    std::vector<std::vector<double>> out(specs.size(),
                                         std::vector<double>(static_cast<std::size_t>(n_outer)));
    std::vector<VectorXd> future(static_cast<std::size_t>(inner ? n_inner : 0));
    std::vector<double> truth(future.size());
    for (long i = 0; i < n_outer; ++i) {
        const VectorXd y = mu + sigma.sqrt() * rng.normal_vector(mu.size());
        if (!inner) {
            for (std::size_t k = 0; k < specs.size(); ++k) {
                out[k][static_cast<std::size_t>(i)] =
                    gaussian_predictive_kl(specs[k], mu, y, sigma, sigma_tilde);
            }
            continue;
        }
        for (std::size_t j = 0; j < future.size(); ++j) {
            future[j] = semidefinite_normal_sample(mu, sigma_tilde, rng);
            truth[j] = plugin_logpdf(future[j], mu, sigma_tilde);
        }
        for (std::size_t k = 0; k < specs.size(); ++k) {
            std::vector<double> terms(future.size());
            if (specs[k].is_plugin()) {
                for (std::size_t j = 0; j < future.size(); ++j)
                    terms[j] = truth[j] - plugin_logpdf(future[j], y, sigma_tilde);
            } else {
                const PredictiveDensity pd(y, sigma, sigma_tilde, *specs[k].prior);
                for (std::size_t j = 0; j < future.size(); ++j)
                    terms[j] = truth[j] - pd.logpdf(future[j]);
            }
            out[k][static_cast<std::size_t>(i)] =
                pairwise_sum(terms) / static_cast<double>(terms.size());
        }
    }
    return out;
}

}  // namespace

RiskEstimate direct_risk(const PredictiveSpec& spec, const VectorXd& mu, const SpdMatrix& sigma,
                         const PsdMatrix& sigma_tilde, long n_outer, long n_inner, Rng& rng) {
    const PredictiveSpec specs[] = {spec};
    const auto samples = direct_risk_samples(specs, mu, sigma, sigma_tilde, n_outer, n_inner, rng);
    return summarize(samples[0], RiskQuantity::Risk);
}

RiskEstimate direct_risk_difference(const PredictiveSpec& a, const PredictiveSpec& b,
                                    const VectorXd& mu, const SpdMatrix& sigma,
                                    const PsdMatrix& sigma_tilde, long n_outer, long n_inner,
                                    Rng& rng) {
    const PredictiveSpec specs[] = {a, b};
    const auto samples = direct_risk_samples(specs, mu, sigma, sigma_tilde, n_outer, n_inner, rng);
    std::vector<double> diff(samples[0].size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = samples[0][i] - samples[1][i];
    return summarize(diff, RiskQuantity::RiskDifference);
}

MatrixXd sample_design(long d, long p, DesignDistribution dist, Rng& rng) {
    if (d < 1 || p < 1) throw std::invalid_argument("sample_design: empty design");
    if (dist == DesignDistribution::StdNormalEntries) return rng.normal_matrix(d, p);
    MatrixXd x(d, p);
    for (long j = 0; j < p; ++j)
        for (long i = 0; i < d; ++i) x(i, j) = rng.uniform(-1.0, 1.0);
    return x;
}

CovarianceEnsemble CovarianceEnsemble::wishart_identity(long d, long df) {
    if (d < 1 || df < 1) throw std::invalid_argument("wishart_identity: invalid dimensions");
    CovarianceEnsemble e(Kind::Wishart, d);
    e.df_ = df;
    return e;
}

CovarianceEnsemble CovarianceEnsemble::design_induced(long d, long p, double noise_var,
                                                      DesignDistribution dist) {
    if (d < 1 || p < 1) throw std::invalid_argument("design_induced: invalid dimensions");
    if (!(noise_var > 0.0)) throw std::invalid_argument("design_induced: noise variance must be > 0");
    CovarianceEnsemble e(Kind::Design, d);
    e.p_ = p;
    e.noise_var_ = noise_var;
    e.dist_ = dist;
    return e;
}

MatrixXd CovarianceEnsemble::draw(Rng& rng) const {
    if (kind_ == Kind::Wishart) {
        const MatrixXd g = rng.normal_matrix(d_, df_);
        return symmetrized(g * g.transpose()) / static_cast<double>(df_);
    }
    const MatrixXd x = sample_design(d_, p_, dist_, rng);
    const PsdMatrix gram = PsdMatrix::from_symmetric_part(x * x.transpose());
    return noise_var_ * gram.pseudo_inverse();
}

SpdMatrix CovarianceEnsemble::draw_spd(Rng& rng) const { return SpdMatrix::from_symmetric_part(draw(rng)); }

PsdMatrix CovarianceEnsemble::draw_psd(Rng& rng) const { return PsdMatrix::from_symmetric_part(draw(rng)); }

RiskEstimate bayes_risk_difference(const PriorFactory& prior, const VectorXd& mu,
                                   const CovarianceEnsemble& sigma_ensemble,
                                   const CovarianceEnsemble& sigma_tilde_ensemble, long reps,
                                   long n_inner, Rng& rng) {
    require_same_dim(sigma_ensemble.dim(), mu.size(), "bayes_risk_difference");
    require_same_dim(sigma_tilde_ensemble.dim(), mu.size(), "bayes_risk_difference");
    if (reps < 2) throw std::invalid_argument("bayes_risk_difference: reps must be >= 2");
    std::vector<double> values(static_cast<std::size_t>(reps));
    for (auto& v : values) {
        const SpdMatrix sigma = sigma_ensemble.draw_spd(rng);
        const PsdMatrix sigma_tilde = sigma_tilde_ensemble.draw_psd(rng);
        v = risk_difference(prior(sigma), mu, sigma, sigma_tilde, n_inner, rng).mean;
    }
    return summarize(values, RiskQuantity::BayesRiskDifference);
}

}  // namespace shrinkage
