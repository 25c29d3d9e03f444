#include "shrinkage/priors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "shrinkage/errors.hpp"

namespace shrinkage {

namespace {

void require_stein_dim(long d) {
    if (d < 3) {
        throw std::invalid_argument("Stein-type priors require d >= 3, got d=" + std::to_string(d));
    }
}

double stein_log_density(long d, double norm) {
    if (!(norm > 0.0)) {
        throw PoleError("Stein prior evaluated at its pole mu = 0");
    }
    return -static_cast<double>(d - 2) * std::log(norm);
}

}  // namespace

Prior Prior::uniform(long d) {
    if (d < 1) throw std::invalid_argument("prior dimension must be positive");
    return Prior(PriorKind::Uniform, d);
}

Prior Prior::stein(long d) {
    require_stein_dim(d);
    return Prior(PriorKind::Stein, d);
}

Prior Prior::rescaled_stein(SpdMatrix sigma_star) {
    require_stein_dim(sigma_star.dim());
    Prior p(PriorKind::RescaledStein, sigma_star.dim());
    p.sigma_star_ = std::move(sigma_star);
    return p;
}

Prior Prior::gaussian_ridge(long d, double lambda) {
    if (d < 1) throw std::invalid_argument("prior dimension must be positive");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("ridge prior requires a finite lambda > 0");
    }
    Prior p(PriorKind::GaussianRidge, d);
    p.lambda_ = lambda;
    return p;
}

Prior Prior::radial(long d, RadialProfile profile) {
    if (d < 1) throw std::invalid_argument("prior dimension must be positive");
    if (!profile.log_g) throw std::invalid_argument("radial prior needs a profile function");
    if (profile.center.size() == 0) profile.center = VectorXd::Zero(d);
    require_same_dim(profile.center.size(), d, "radial prior center");
    Prior p(PriorKind::Radial, d);
    p.radial_ = std::move(profile);
    return p;
}

const SpdMatrix& Prior::sigma_star() const {
    if (!sigma_star_) throw std::logic_error("prior has no rescaling matrix");
    return *sigma_star_;
}

const RadialProfile& Prior::radial_profile() const {
    if (!radial_) throw std::logic_error("prior is not radial");
    return *radial_;
}

bool Prior::supports_rejection_bound() const {
    return kind_ != PriorKind::Radial || radial_->nonincreasing;
}

VectorXd Prior::center() const {
    return kind_ == PriorKind::Radial ? radial_->center : VectorXd::Zero(dim_);
}

std::string Prior::name() const {
    switch (kind_) {
        case PriorKind::Uniform: return "uniform";
        case PriorKind::Stein: return "stein";
        case PriorKind::RescaledStein: return "rescaled_stein";
        case PriorKind::GaussianRidge: {
            std::ostringstream os;
            os << "ridge(" << lambda_ << ")";
            return os.str();
        }
        case PriorKind::Radial: return radial_->label;
    }
    return "unknown";
}

double log_prior(const Prior& prior, const VectorXd& mu) {
    require_same_dim(mu.size(), prior.dim(), "log_prior");
    const long d = prior.dim();
    switch (prior.kind()) {
        case PriorKind::Uniform:
            return 0.0;
        case PriorKind::Stein:
            return stein_log_density(d, mu.norm());
        case PriorKind::RescaledStein:
            return stein_log_density(d, (prior.sigma_star().inv_sqrt() * mu).norm());
        case PriorKind::GaussianRidge: {
            const double lam = prior.lambda();
            return 0.5 * static_cast<double>(d) * std::log(lam / (2.0 * std::numbers::pi)) -
                   0.5 * lam * mu.squaredNorm();
        }
        case PriorKind::Radial: {
            const auto& rp = prior.radial_profile();
            return rp.log_g((mu - rp.center).norm());
        }
    }
    return 0.0;
}

AstarMatrix build_astar(const SpdMatrix& sigma1, const SpdMatrix& sigma2) {
    require_same_dim(sigma1.dim(), sigma2.dim(), "build_astar");
    const long d = sigma1.dim();
    const MatrixXd diff = symmetrized(sigma2.entries() - sigma1.entries());
    Eigen::SelfAdjointEigenSolver<MatrixXd> diff_es(diff);
    const double scale = std::max(sigma1.eigenvalues()(0), sigma2.eigenvalues()(0));
    if (diff_es.eigenvalues().minCoeff() < -1e-10 * scale) {
        throw std::invalid_argument("build_astar: Sigma1 is not below Sigma2 in Loewner order");
    }

    const MatrixXd s = symmetrized(sigma1.sqrt() * sigma2.inverse() * sigma1.sqrt());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(s);
    // s = V diag(lambda) V^T, so U^T = V.
    const VectorXd lam = es.eigenvalues();
    const MatrixXd& v = es.eigenvectors();
    VectorXd scale_cols(d);
    long rank = 0;
    for (long i = 0; i < d; ++i) {
        if (std::abs(lam(i) - 1.0) < kUnitEigenvalueTolerance || lam(i) >= 1.0) {
            scale_cols(i) = 0.0;
        } else {
            scale_cols(i) = std::sqrt(1.0 / lam(i) - 1.0);
            ++rank;
        }
    }
    AstarMatrix out;
    out.a_star = sigma1.sqrt() * v * scale_cols.asDiagonal();
    out.sigma1 = sigma1.entries();
    out.sigma2 = sigma2.entries();
    out.lambda = lam;
    out.rank = rank;
    out.below_superharmonic_rank = rank < 3;
    return out;
}

std::pair<double, double> rescaled_stein_identity_check(const SpdMatrix& sigma1,
                                                        const SpdMatrix& sigma2,
                                                        const VectorXd& mu) {
    const AstarMatrix astar = build_astar(sigma1, sigma2);
    if (astar.rank < sigma1.dim()) {
        throw RankDeficient("rescaled_stein_identity_check: Sigma2 - Sigma1 is singular");
    }
    const Prior rescaled =
        Prior::rescaled_stein(SpdMatrix::from_symmetric_part(sigma2.entries() - sigma1.entries()));
    const Prior plain = Prior::stein(sigma1.dim());
    return {log_prior(rescaled, astar.a_star * mu), log_prior(plain, mu)};
}

SuperharmonicityReport superharmonicity_check(const Prior& prior,
                                              const std::vector<VectorXd>& points, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("superharmonicity_check: step must be positive");
    SuperharmonicityReport report;
    report.laplacians.reserve(points.size());
    report.max_laplacian = -std::numeric_limits<double>::infinity();
    const long d = prior.dim();
    for (const VectorXd& mu : points) {
        require_same_dim(mu.size(), d, "superharmonicity_check");
        if (prior.is_stein_type() && mu.norm() < 10.0 * h) {
            throw std::invalid_argument("superharmonicity_check: point too close to the pole");
        }
        const double center = std::exp(log_prior(prior, mu));
        double lap = 0.0;
        for (long i = 0; i < d; ++i) {
            VectorXd plus = mu, minus = mu;
            plus(i) += h;
            minus(i) -= h;
            lap += std::exp(log_prior(prior, plus)) + std::exp(log_prior(prior, minus)) - 2.0 * center;
        }
        lap /= h * h;
        report.laplacians.push_back(lap);
        report.max_laplacian = std::max(report.max_laplacian, lap);
    }
    return report;
}

}  // namespace shrinkage
