#ifndef SHRINKAGE_PREDICTIVE_HPP
#define SHRINKAGE_PREDICTIVE_HPP

#include "shrinkage/gaussian.hpp"
#include "shrinkage/marginals.hpp"
#include "shrinkage/priors.hpp"
#include "shrinkage/rng.hpp"

namespace shrinkage {

/// Bayesian predictive density p_pi(y_tilde | y) for y ~ N(mu, Sigma) and
/// y_tilde ~ N(mu, SigmaTilde), evaluated through
///
///   p_pi(y_tilde | y) = p_I(y_tilde | y) m_pi(w; Sigma_w) / m_pi(y; Sigma).
///
/// For rank-deficient SigmaTilde the density is over the support coordinates
/// of SigmaTilde (see uniform_predictive_logpdf). Sigma_w does not depend on
/// y_tilde, so both marginal evaluators are built once.
class PredictiveDensity {
public:
    PredictiveDensity(VectorXd y, SpdMatrix sigma, PsdMatrix sigma_tilde, Prior prior,
                      MarginalOptions options = {});

    const VectorXd& y() const { return y_; }
    const SpdMatrix& sigma() const { return sigma_; }
    const PsdMatrix& sigma_tilde() const { return sigma_tilde_; }
    const SpdMatrix& sigma_w() const { return sigma_w_; }
    const Prior& prior() const { return prior_; }
    double log_marginal_at_y() const { return log_m_y_; }

    double logpdf(const VectorXd& y_tilde) const;
    // Mean of the predictive: the posterior mean, projected onto the support of
    // SigmaTilde when it is rank-deficient.
    VectorXd mean() const;

    struct Draw {
        VectorXd value;
        long proposals;
    };
    // Exact rejection sampler with proposal p_I and bound m(center; Sigma_w).
    // Throws SamplerError when the acceptance rate drops below 1e-4.
    Draw sample(Rng& rng) const;

private:
    VectorXd propose(Rng& rng) const;

    VectorXd y_;
    SpdMatrix sigma_;
    PsdMatrix sigma_tilde_;
    Prior prior_;
    SpdMatrix sigma_w_;
    MarginalEvaluator at_sigma_;
    MarginalEvaluator at_sigma_w_;
    double log_m_y_;
    // Proposal on the support coordinates: N(B^T y, B^T (Sigma + SigmaTilde) B).
    MatrixXd proposal_root_;
    double log_bound_;
};

double predictive_logpdf(const PredictiveDensity& pd, const VectorXd& y_tilde);

struct PredictiveSample {
    std::vector<VectorXd> draws;
    double acceptance_rate;
};
PredictiveSample predictive_sample(const PredictiveDensity& pd, long n, Rng& rng);

// log N(y_tilde; mean, SigmaTilde), on the support for rank-deficient
// SigmaTilde.
double plugin_logpdf(const VectorXd& y_tilde, const VectorXd& mean, const PsdMatrix& sigma_tilde);

}  // namespace shrinkage

#endif
