#include "shrinkage/gaussian.hpp"

#include <cmath>
#include <numbers>

#include "shrinkage/errors.hpp"

namespace shrinkage {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

double diagonal_gaussian_pdf(const VectorXd& x, const VectorXd& mu, const VectorXd& a) {
    const long d = x.size();
    double quad = 0.0;
    double log_det = 0.0;
    for (long i = 0; i < d; ++i) {
        const double r = x(i) - mu(i);
        quad += r * r / a(i);
        log_det += std::log(a(i));
    }
    return std::exp(-0.5 * (static_cast<double>(d) * kLog2Pi + log_det + quad));
}

}  // namespace

SpdMatrix combined_covariance(const SpdMatrix& sigma, const PsdMatrix& sigma_tilde) {
    require_same_dim(sigma_tilde.dim(), sigma.dim(), "combine");
    const MatrixXd precision = sigma.inverse() + sigma_tilde.pseudo_inverse();
    const SpdMatrix prec = SpdMatrix::from_symmetric_part(precision);
    return SpdMatrix::from_symmetric_part(prec.inverse());
}

VectorXd combined_mean(const SpdMatrix& sigma, const PsdMatrix& sigma_tilde,
                       const SpdMatrix& sigma_w, const VectorXd& y, const VectorXd& y_tilde) {
    require_same_dim(y.size(), sigma.dim(), "combine: y");
    require_same_dim(y_tilde.size(), sigma.dim(), "combine: y_tilde");
    return sigma_w.entries() * (sigma.inverse() * y + sigma_tilde.pseudo_inverse() * y_tilde);
}

CombinedStat combine(const SpdMatrix& sigma, const PsdMatrix& sigma_tilde, const VectorXd& y,
                     const VectorXd& y_tilde) {
    SpdMatrix sigma_w = combined_covariance(sigma, sigma_tilde);
    VectorXd w = combined_mean(sigma, sigma_tilde, sigma_w, y, y_tilde);
    return CombinedStat{std::move(w), std::move(sigma_w)};
}

double gaussian_logpdf(const VectorXd& x, const VectorXd& mean, const SpdMatrix& cov) {
    require_same_dim(x.size(), cov.dim(), "gaussian_logpdf");
    require_same_dim(mean.size(), cov.dim(), "gaussian_logpdf");
    const double d = static_cast<double>(cov.dim());
    return -0.5 * (d * kLog2Pi + cov.log_det() + cov.inv_quad(x - mean));
}

double uniform_predictive_logpdf(const VectorXd& y_tilde, const VectorXd& y,
                                 const SpdMatrix& sigma, const PsdMatrix& sigma_tilde) {
    require_same_dim(sigma_tilde.dim(), sigma.dim(), "uniform_predictive_logpdf");
    if (sigma_tilde.full_rank()) {
        const SpdMatrix total = SpdMatrix::from_symmetric_part(sigma.entries() + sigma_tilde.entries());
        return gaussian_logpdf(y_tilde, y, total);
    }
    const MatrixXd& basis = sigma_tilde.range_basis();
    const SpdMatrix total = SpdMatrix::from_symmetric_part(
        basis.transpose() * (sigma.entries() + sigma_tilde.entries()) * basis);
    const VectorXd s = basis.transpose() * y_tilde;
    const VectorXd m = basis.transpose() * y;
    return gaussian_logpdf(s, m, total);
}

double gaussian_kl(const VectorXd& mu1, const PsdMatrix& s1, const VectorXd& mu2,
                   const SpdMatrix& s2) {
    return gaussian_kl(mu1, s1, mu2, s2.entries());
}

double gaussian_kl(const VectorXd& mu1, const PsdMatrix& s1, const VectorXd& mu2,
                   const MatrixXd& s2) {
    require_same_dim(s2.rows(), s1.dim(), "gaussian_kl");
    require_same_dim(s2.cols(), s1.dim(), "gaussian_kl");
    require_same_dim(mu1.size(), s1.dim(), "gaussian_kl: mu1");
    require_same_dim(mu2.size(), s1.dim(), "gaussian_kl: mu2");
    if (!mu1.allFinite() || !mu2.allFinite()) {
        throw NonFiniteError("gaussian_kl: non-finite mean");
    }
    const MatrixXd& basis = s1.range_basis();
    const VectorXd diff = basis.transpose() * (mu2 - mu1);
    const MatrixXd s2_proj = symmetrized(basis.transpose() * s2 * basis);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(s2_proj);
    const VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() <= kDefinitenessFloor * ev.maxCoeff()) {
        throw InfiniteDivergence("gaussian_kl: target covariance is singular on the support");
    }
    // On the support basis, s1 is diagonal with its nonzero eigenvalues.
    const MatrixXd s2_inv = es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                            es.eigenvectors().transpose();
    const VectorXd& lam = s1.support_eigenvalues();
    const double trace = (s2_inv.diagonal().array() * lam.array()).sum();
    const double quad = diff.dot(s2_inv * diff);
    const double log_det_ratio = ev.array().log().sum() - s1.log_pdet();
    return 0.5 * (trace - static_cast<double>(s1.rank()) + quad + log_det_ratio);
}

VectorXd semidefinite_normal_sample(const VectorXd& mu, const PsdMatrix& cov, Rng& rng) {
    require_same_dim(mu.size(), cov.dim(), "semidefinite_normal_sample");
    return mu + cov.support() * rng.normal_vector(cov.rank());
}

HeatIdentity diagonal_heat_identity(const VectorXd& x, const VectorXd& mu, const VectorXd& a,
                                    double h) {
    require_same_dim(mu.size(), x.size(), "diagonal_heat_identity");
    require_same_dim(a.size(), x.size(), "diagonal_heat_identity");
    if (!(h > 0.0)) throw std::invalid_argument("diagonal_heat_identity: step must be positive");
    if ((a.array() <= 0.0).any()) {
        throw std::invalid_argument("diagonal_heat_identity: variances must be positive");
    }
    const long d = x.size();
    const double center = diagonal_gaussian_pdf(x, mu, a);
    double derivative_sum = 0.0;
    double laplacian = 0.0;
    for (long i = 0; i < d; ++i) {
        const double ha = h * a(i);
        VectorXd ap = a, am = a;
        ap(i) += ha;
        am(i) -= ha;
        derivative_sum +=
            (diagonal_gaussian_pdf(x, mu, ap) - diagonal_gaussian_pdf(x, mu, am)) / (2.0 * ha);

        const double hx = h * std::sqrt(a(i));
        VectorXd xp = x, xm = x;
        xp(i) += hx;
        xm(i) -= hx;
        laplacian += (diagonal_gaussian_pdf(xp, mu, a) + diagonal_gaussian_pdf(xm, mu, a) -
                      2.0 * center) / (hx * hx);
    }
    return HeatIdentity{derivative_sum, 0.5 * laplacian};
}

}  // namespace shrinkage
