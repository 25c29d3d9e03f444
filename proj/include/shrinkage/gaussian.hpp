#ifndef SHRINKAGE_GAUSSIAN_HPP
#define SHRINKAGE_GAUSSIAN_HPP

#include "shrinkage/linalg.hpp"
#include "shrinkage/rng.hpp"

namespace shrinkage {

// Precision-weighted combination of the current and the future observation.
struct CombinedStat {
    VectorXd w;
    SpdMatrix sigma_w;
};

// sigma_w = (Sigma^{-1} + SigmaTilde^+)^{-1}; the pseudo-inverse equals the
// inverse when SigmaTilde has full rank.
SpdMatrix combined_covariance(const SpdMatrix& sigma, const PsdMatrix& sigma_tilde);

// w = sigma_w (Sigma^{-1} y + SigmaTilde^+ y_tilde).
CombinedStat combine(const SpdMatrix& sigma, const PsdMatrix& sigma_tilde, const VectorXd& y,
                     const VectorXd& y_tilde);

// Same as combine() with sigma_w precomputed by combined_covariance().
VectorXd combined_mean(const SpdMatrix& sigma, const PsdMatrix& sigma_tilde,
                       const SpdMatrix& sigma_w, const VectorXd& y, const VectorXd& y_tilde);

double gaussian_logpdf(const VectorXd& x, const VectorXd& mean, const SpdMatrix& cov);

/// log p_I(y_tilde | y): the predictive density under the flat prior,
/// N(y_tilde; y, Sigma + SigmaTilde).
///
/// For rank-deficient SigmaTilde the future observation only carries
/// information on the column space of SigmaTilde, so the density is taken
/// with respect to Lebesgue measure on the support coordinates B^T y_tilde
/// (B an orthonormal basis of the column space).
double uniform_predictive_logpdf(const VectorXd& y_tilde, const VectorXd& y,
                                 const SpdMatrix& sigma, const PsdMatrix& sigma_tilde);

/// KL(N(mu1, s1) || N(mu2, s2)).
///
/// A rank-deficient s1 is handled on its support: both laws are projected
/// onto the column space of s1. Throws InfiniteDivergence when s2 restricted
/// to that support is not definite, and NonFiniteError on non-finite means.
double gaussian_kl(const VectorXd& mu1, const PsdMatrix& s1, const VectorXd& mu2,
                   const SpdMatrix& s2);
// Same, with a target covariance that only needs to be definite on the
// support of s1.
double gaussian_kl(const VectorXd& mu1, const PsdMatrix& s1, const VectorXd& mu2,
                   const MatrixXd& s2);

// mu + L z with z ~ N(0, I_k); the draw lies in mu + range(L) exactly.
VectorXd semidefinite_normal_sample(const VectorXd& mu, const PsdMatrix& cov, Rng& rng);

// Both sides of sum_i dN/da_i = (1/2) Laplacian_x N for N(x; mu, diag(a)),
// each by central finite differences with relative step h.
struct HeatIdentity {
    double diagonal_derivative_sum;
    double half_laplacian;
};
HeatIdentity diagonal_heat_identity(const VectorXd& x, const VectorXd& mu, const VectorXd& a,
                                    double h = 1e-3);

}  // namespace shrinkage

#endif
