#include "shrinkage/predictive.hpp"

#include <cmath>
#include <numbers>

#include "shrinkage/errors.hpp"

namespace shrinkage {

namespace {

constexpr double kMinAcceptance = 1e-4;
constexpr long kMinProposalsForRate = 10000;

}  // namespace

PredictiveDensity::PredictiveDensity(VectorXd y, SpdMatrix sigma, PsdMatrix sigma_tilde,
                                     Prior prior, MarginalOptions options)
    : y_(std::move(y)),
      sigma_(std::move(sigma)),
      sigma_tilde_(std::move(sigma_tilde)),
      prior_(std::move(prior)),
      sigma_w_(combined_covariance(sigma_, sigma_tilde_)),
      at_sigma_(prior_, sigma_, options),
      at_sigma_w_(prior_, sigma_w_, options) {
    require_same_dim(y_.size(), sigma_.dim(), "PredictiveDensity: y");
    require_same_dim(prior_.dim(), sigma_.dim(), "PredictiveDensity: prior");
    log_m_y_ = at_sigma_.log_marginal(y_);
    const MatrixXd& basis = sigma_tilde_.range_basis();
    const SpdMatrix total = SpdMatrix::from_symmetric_part(
        basis.transpose() * (sigma_.entries() + sigma_tilde_.entries()) * basis);
    proposal_root_ = basis * total.sqrt();
    log_bound_ = prior_.supports_rejection_bound()
                     ? at_sigma_w_.log_marginal(prior_.center())
                     : std::numeric_limits<double>::quiet_NaN();
}

double PredictiveDensity::logpdf(const VectorXd& y_tilde) const {
    require_same_dim(y_tilde.size(), sigma_.dim(), "predictive_logpdf");
    const double base = uniform_predictive_logpdf(y_tilde, y_, sigma_, sigma_tilde_);
    if (prior_.is_constant()) return base;
    const VectorXd w = combined_mean(sigma_, sigma_tilde_, sigma_w_, y_, y_tilde);
    return base + at_sigma_w_.log_marginal(w) - log_m_y_;
}

VectorXd PredictiveDensity::mean() const {
    const VectorXd post = posterior_mean(at_sigma_, y_);
    if (sigma_tilde_.full_rank()) return post;
    const MatrixXd& b = sigma_tilde_.range_basis();
    return b * (b.transpose() * post);
}

VectorXd PredictiveDensity::propose(Rng& rng) const {
    const MatrixXd& b = sigma_tilde_.range_basis();
    return b * (b.transpose() * y_) + proposal_root_ * rng.normal_vector(sigma_tilde_.rank());
}

PredictiveDensity::Draw PredictiveDensity::sample(Rng& rng) const {
    if (prior_.is_constant()) return {propose(rng), 1};
    if (!prior_.supports_rejection_bound()) {
        throw SamplerError("predictive_sample: prior does not declare a radially nonincreasing profile");
    }
    long proposals = 0;
    while (true) {
        VectorXd candidate = propose(rng);
        ++proposals;
        const VectorXd w = combined_mean(sigma_, sigma_tilde_, sigma_w_, y_, candidate);
        const double log_accept = at_sigma_w_.log_marginal(w) - log_bound_;
        if (std::log(rng.uniform()) < log_accept) return {std::move(candidate), proposals};
        if (proposals >= kMinProposalsForRate &&
            1.0 / static_cast<double>(proposals) < kMinAcceptance) {
            throw SamplerError("predictive_sample: acceptance rate below 1e-4");
        }
    }
}

double predictive_logpdf(const PredictiveDensity& pd, const VectorXd& y_tilde) {
    return pd.logpdf(y_tilde);
}

PredictiveSample predictive_sample(const PredictiveDensity& pd, long n, Rng& rng) {
    PredictiveSample out;
    out.draws.reserve(static_cast<std::size_t>(n));
    long proposals = 0;
    for (long i = 0; i < n; ++i) {
        auto draw = pd.sample(rng);
        proposals += draw.proposals;
        out.draws.push_back(std::move(draw.value));
        if (proposals >= kMinProposalsForRate &&
            static_cast<double>(i + 1) / static_cast<double>(proposals) < kMinAcceptance) {
            throw SamplerError("predictive_sample: acceptance rate below 1e-4");
        }
    }
    out.acceptance_rate = n > 0 ? static_cast<double>(n) / static_cast<double>(proposals) : 1.0;
    return out;
}

double plugin_logpdf(const VectorXd& y_tilde, const VectorXd& mean, const PsdMatrix& sigma_tilde) {
    require_same_dim(y_tilde.size(), sigma_tilde.dim(), "plugin_logpdf");
    require_same_dim(mean.size(), sigma_tilde.dim(), "plugin_logpdf");
    const MatrixXd& b = sigma_tilde.range_basis();
    const VectorXd r = b.transpose() * (y_tilde - mean);
    const VectorXd& lam = sigma_tilde.support_eigenvalues();
    const double quad = (r.array().square() / lam.array()).sum();
    return -0.5 * (static_cast<double>(sigma_tilde.rank()) * std::log(2.0 * std::numbers::pi) +
                   sigma_tilde.log_pdet() + quad);
}

}  // namespace shrinkage
