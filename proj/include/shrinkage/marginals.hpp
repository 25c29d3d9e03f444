#ifndef SHRINKAGE_MARGINALS_HPP
#define SHRINKAGE_MARGINALS_HPP

#include <cstdint>

#include "shrinkage/linalg.hpp"
#include "shrinkage/priors.hpp"
#include "shrinkage/rng.hpp"

namespace shrinkage {

enum class MarginalMethod { ClosedForm, Quadrature1D, MonteCarlo };

struct MarginalOptions {
    double rel_tol = 1e-8;
    // Radial priors only: fixed common draws for the Monte Carlo marginal.
    long radial_draws = 20000;
    std::uint64_t radial_seed = 0x5eed;
};

/// log m_pi(z; C) = log of the integral of N(z; mu, C) pi(mu) over mu.
///
/// Uniform and GaussianRidge priors have closed forms (0 and a Gaussian
/// convolution). Stein-type priors use the Gamma-integral representation
///
///   m(z; C) = 1/Gamma(a) * int_0^inf t^{a-1} |I + 2tC'|^{-1/2}
///                              exp(-t z'^T (I + 2tC')^{-1} z') dt,
///
/// with a = (d-2)/2 and (z', C') the coordinates whitened by the rescaling
/// matrix; the integral is evaluated in log t by adaptive Gauss-Kronrod
/// quadrature after diagonalizing C' once at construction. Radial priors use
/// a fixed-draw Monte Carlo average.
///
/// The evaluator is immutable and safe to share across threads.
class MarginalEvaluator {
public:
    MarginalEvaluator(Prior prior, SpdMatrix cov, MarginalOptions options = {});

    MarginalMethod method() const { return method_; }
    const Prior& prior() const { return prior_; }
    const SpdMatrix& cov() const { return cov_; }
    long dim() const { return cov_.dim(); }

    // Throws QuadratureError or NonFiniteError.
    double log_marginal(const VectorXd& z) const;
    VectorXd grad_log_marginal(const VectorXd& z) const;

private:
    struct SteinTerms {
        double log_value;
        VectorXd grad;  // in eigen-coordinates, empty unless requested
    };
    SteinTerms stein_terms(const VectorXd& z, bool with_grad) const;
    double radial_log_marginal(const VectorXd& z) const;

    Prior prior_;
    SpdMatrix cov_;
    MarginalOptions options_;
    MarginalMethod method_;
    // Stein variants: eigen-coordinates of the whitened problem.
    MatrixXd to_eigen_;
    VectorXd eig_;
    // GaussianRidge: C + lambda^{-1} I.
    std::optional<SpdMatrix> ridge_total_;
    // Radial: sqrt(C) * eps_j, one column per draw.
    MatrixXd radial_offsets_;
};

double log_marginal(const MarginalEvaluator& ev, const VectorXd& z);
VectorXd grad_log_marginal(const MarginalEvaluator& ev, const VectorXd& z);

struct MarginalOracleResult {
    double estimate;   // of m (not log m)
    double std_error;
    long rejected;     // Stein-pole draws redrawn
};

// Draws mu ~ N(z, C) and averages pi(mu). Requires n >= 1000.
MarginalOracleResult log_marginal_mc_oracle(const Prior& prior, const SpdMatrix& cov,
                                            const VectorXd& z, long n, Rng& rng);

// E[mu | y] = y + Sigma grad log m(y; Sigma).
VectorXd posterior_mean(const Prior& prior, const VectorXd& y, const SpdMatrix& sigma);
VectorXd posterior_mean(const MarginalEvaluator& ev, const VectorXd& y);

}  // namespace shrinkage

#endif
