#ifndef SHRINKAGE_RISK_HPP
#define SHRINKAGE_RISK_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shrinkage/linalg.hpp"
#include "shrinkage/marginals.hpp"
#include "shrinkage/priors.hpp"
#include "shrinkage/rng.hpp"

namespace shrinkage {

enum class RiskQuantity { Phi, PhiDifference, Risk, RiskDifference, BayesRiskDifference };

struct RiskEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n = 0;
    RiskQuantity quantity = RiskQuantity::Risk;
};

// Pairwise (order-fixed) summation.
double pairwise_sum(std::span<const double> values);
// Mean and standard error of the mean; requires at least 2 values.
RiskEstimate summarize(std::span<const double> values, RiskQuantity quantity);

// phi(mu, C) = E_{z ~ N(mu, C)} log m(z; C).
RiskEstimate phi_estimate(const Prior& prior, const VectorXd& mu, const SpdMatrix& cov, long n,
                          Rng& rng);

// phi(mu, C1) - phi(mu, C2) with common draws z_k = mu + C_k^{1/2} eps.
RiskEstimate phi_difference(const Prior& prior, const VectorXd& mu, const SpdMatrix& cov1,
                            const SpdMatrix& cov2, long n, Rng& rng);

/// R_KL(pi, mu) - R_KL(pi_I, mu) = phi(mu, Sigma) - phi(mu, Sigma_w).
/// Negative values mean the prior improves on the flat prior.
RiskEstimate risk_difference(const Prior& prior, const VectorXd& mu, const SpdMatrix& sigma,
                             const PsdMatrix& sigma_tilde, long n, Rng& rng);

// A predictive density to score: Bayes under a prior, or the plug-in
// N(y, SigmaTilde).
struct PredictiveSpec {
    std::optional<Prior> prior;  // empty for plug-in

    static PredictiveSpec bayes(Prior p) { return PredictiveSpec{std::move(p)}; }
    static PredictiveSpec plugin() { return PredictiveSpec{}; }
    bool is_plugin() const { return !prior.has_value(); }
    // Uniform, ridge and plug-in predictives are Gaussian.
    bool is_gaussian() const;
    std::string name() const;
};

/// Nested Monte Carlo of R_KL: y ~ N(mu, Sigma) outer; the KL divergence
/// from N(mu, SigmaTilde) is closed-form for Gaussian predictives and an
/// inner average over y_tilde ~ N(mu, SigmaTilde) otherwise.
RiskEstimate direct_risk(const PredictiveSpec& spec, const VectorXd& mu, const SpdMatrix& sigma,
                         const PsdMatrix& sigma_tilde, long n_outer, long n_inner, Rng& rng);

// direct_risk(a) - direct_risk(b) on shared (y, y_tilde) draws. When either
// predictive is non-Gaussian both use the inner average.
RiskEstimate direct_risk_difference(const PredictiveSpec& a, const PredictiveSpec& b,
                                    const VectorXd& mu, const SpdMatrix& sigma,
                                    const PsdMatrix& sigma_tilde, long n_outer, long n_inner,
                                    Rng& rng);

// KL(N(mu, SigmaTilde) || p_hat(. | y)) for a Gaussian predictive.
double gaussian_predictive_kl(const PredictiveSpec& spec, const VectorXd& mu,
                              const VectorXd& y, const SpdMatrix& sigma,
                              const PsdMatrix& sigma_tilde);

enum class DesignDistribution { StdNormalEntries, UniformPm1 };

// Draws d x p designs with i.i.d. entries.
MatrixXd sample_design(long d, long p, DesignDistribution dist, Rng& rng);

/// Rotation-invariant random covariance matrices.
///
/// WishartIdentity(df): W / df with W = G G^T, G a d x df standard normal
/// matrix (mean I). DesignInduced: noise_var * (X X^T)^+ for a d x p design
/// with i.i.d. entries.
class CovarianceEnsemble {
public:
    static CovarianceEnsemble wishart_identity(long d, long df);
    static CovarianceEnsemble design_induced(long d, long p, double noise_var,
                                             DesignDistribution dist);

    long dim() const { return d_; }
    MatrixXd draw(Rng& rng) const;
    // Throws NotPositiveDefinite when the draw is singular.
    SpdMatrix draw_spd(Rng& rng) const;
    PsdMatrix draw_psd(Rng& rng) const;

private:
    enum class Kind { Wishart, Design };
    CovarianceEnsemble(Kind kind, long d) : kind_(kind), d_(d) {}

    Kind kind_;
    long d_;
    long df_ = 0;
    long p_ = 0;
    double noise_var_ = 1.0;
    DesignDistribution dist_ = DesignDistribution::StdNormalEntries;
};

// Builds the prior for one draw of Sigma (e.g. pi_Sigma rescaled by it).
using PriorFactory = std::function<Prior(const SpdMatrix& sigma)>;

// Average of risk_difference over (Sigma, SigmaTilde) drawn from the
// ensembles: reps outer draws, n_inner z-draws each.
RiskEstimate bayes_risk_difference(const PriorFactory& prior, const VectorXd& mu,
                                   const CovarianceEnsemble& sigma_ensemble,
                                   const CovarianceEnsemble& sigma_tilde_ensemble, long reps,
                                   long n_inner, Rng& rng);

}  // namespace shrinkage

#endif
