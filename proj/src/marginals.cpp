#include "shrinkage/marginals.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "shrinkage/errors.hpp"
#include "shrinkage/gaussian.hpp"
#include "shrinkage/quadrature.hpp"

namespace shrinkage {

namespace {

// Integrand tails are cut where they fall below exp(-kTailLog) of the
// value at the centre.
constexpr double kTailLog = 40.0;
constexpr double kPoleRadius = 1e-12;

struct SteinProblem {
    const VectorXd& z;    // eigen-coordinates
    const VectorXd& eig;  // eigenvalues of C'
    double a;

    double log_g(double t) const {
        double s = 0.0;
        for (long i = 0; i < z.size(); ++i) {
            const double q = 1.0 + 2.0 * t * eig(i);
            s -= 0.5 * std::log1p(2.0 * t * eig(i)) + t * z(i) * z(i) / q;
        }
        return s;
    }

    // d/dx [a x + log_g(e^x)] at t = e^x.
    double slope(double t) const {
        double s = a;
        for (long i = 0; i < z.size(); ++i) {
            const double q = 1.0 + 2.0 * t * eig(i);
            s -= t * eig(i) / q + t * z(i) * z(i) / (q * q);
        }
        return s;
    }

    // Centre of the log-t integrand: a root of slope(), by bisection.
    double centre() const {
        double lo = -60.0, hi = 60.0;
        for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (slope(std::exp(mid)) > 0.0) lo = mid; else hi = mid;
        }
        return std::exp(0.5 * (lo + hi));
    }
};

}  // namespace

MarginalEvaluator::MarginalEvaluator(Prior prior, SpdMatrix cov, MarginalOptions options)
    : prior_(std::move(prior)), cov_(std::move(cov)), options_(options) {
    require_same_dim(cov_.dim(), prior_.dim(), "MarginalEvaluator");
    switch (prior_.kind()) {
        case PriorKind::Uniform:
            method_ = MarginalMethod::ClosedForm;
            break;
        case PriorKind::GaussianRidge:
            method_ = MarginalMethod::ClosedForm;
            ridge_total_ = SpdMatrix::from_symmetric_part(
                cov_.entries() + MatrixXd::Identity(dim(), dim()) / prior_.lambda());
            break;
        case PriorKind::Stein:
            method_ = MarginalMethod::Quadrature1D;
            to_eigen_ = cov_.eigenvectors().transpose();
            eig_ = cov_.eigenvalues();
            break;
        case PriorKind::RescaledStein: {
            method_ = MarginalMethod::Quadrature1D;
            const MatrixXd& w = prior_.sigma_star().inv_sqrt();
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrized(w * cov_.entries() * w));
            eig_ = es.eigenvalues();
            to_eigen_ = es.eigenvectors().transpose() * w;
            break;
        }
        case PriorKind::Radial: {
            method_ = MarginalMethod::MonteCarlo;
            if (options_.radial_draws < 1000) {
                throw std::invalid_argument("radial marginal needs at least 1000 draws");
            }
            Rng rng(options_.radial_seed);
            radial_offsets_ = cov_.sqrt() * rng.normal_matrix(dim(), options_.radial_draws);
            break;
        }
    }
}

MarginalEvaluator::SteinTerms MarginalEvaluator::stein_terms(const VectorXd& z,
                                                             bool with_grad) const {
    require_same_dim(z.size(), dim(), "log_marginal");
    if (!z.allFinite()) throw NonFiniteError("log_marginal: non-finite argument");
    const VectorXd ze = to_eigen_ * z;
    const long d = dim();
    const double a = 0.5 * static_cast<double>(d - 2);
    const SteinProblem problem{ze, eig_, a};

    const double tc = problem.centre();
    const double log_g0 = problem.log_g(tc);
    // Upper bounds of the log integrand relative to x = 0 give the cut-offs.
    const double x_lo = (log_g0 - kTailLog) / a;
    double log_scale = 0.0;
    for (long i = 0; i < d; ++i) log_scale += std::log(2.0 * tc * eig_(i));
    const double x_hi = std::max(1.0, -0.5 * log_scale - log_g0 + kTailLog);

    const std::size_t ncomp = with_grad ? static_cast<std::size_t>(d) + 1 : 1;
    auto integrand = [&](double x, double* out) {
        const double t = tc * std::exp(x);
        const double f = std::exp(a * x + problem.log_g(t) - log_g0);
        out[0] = f;
        if (with_grad) {
            for (long i = 0; i < d; ++i) {
                out[i + 1] = -2.0 * t * ze(i) / (1.0 + 2.0 * t * eig_(i)) * f;
            }
        }
    };
    const QuadratureResult q =
        integrate_adaptive(integrand, x_lo, x_hi, ncomp, options_.rel_tol, 0.0, 8);
    if (!q.converged) {
        throw QuadratureError("log_marginal: quadrature did not reach the relative tolerance");
    }
    SteinTerms out;
    out.log_value = -std::lgamma(a) + a * std::log(tc) + log_g0 + std::log(q.value[0]);
    if (!std::isfinite(out.log_value)) {
        throw NonFiniteError("log_marginal: non-finite marginal");
    }
    if (with_grad) {
        out.grad.resize(d);
        for (long i = 0; i < d; ++i) out.grad(i) = q.value[i + 1] / q.value[0];
    }
    return out;
}

double MarginalEvaluator::radial_log_marginal(const VectorXd& z) const {
    const auto& rp = prior_.radial_profile();
    const long n = radial_offsets_.cols();
    std::vector<double> logs(static_cast<std::size_t>(n));
    double top = -std::numeric_limits<double>::infinity();
    for (long j = 0; j < n; ++j) {
        const double v = rp.log_g((z + radial_offsets_.col(j) - rp.center).norm());
        logs[static_cast<std::size_t>(j)] = v;
        top = std::max(top, v);
    }
    if (!std::isfinite(top)) throw NonFiniteError("log_marginal: radial profile not finite");
    double s = 0.0;
    for (double v : logs) s += std::exp(v - top);
    return top + std::log(s / static_cast<double>(n));
}

double MarginalEvaluator::log_marginal(const VectorXd& z) const {
    require_same_dim(z.size(), dim(), "log_marginal");
    switch (prior_.kind()) {
        case PriorKind::Uniform:
            return 0.0;
        case PriorKind::GaussianRidge:
            return gaussian_logpdf(z, VectorXd::Zero(dim()), *ridge_total_);
        case PriorKind::Stein:
        case PriorKind::RescaledStein:
            return stein_terms(z, false).log_value;
        case PriorKind::Radial:
            return radial_log_marginal(z);
    }
    return 0.0;
}

VectorXd MarginalEvaluator::grad_log_marginal(const VectorXd& z) const {
    require_same_dim(z.size(), dim(), "grad_log_marginal");
    switch (prior_.kind()) {
        case PriorKind::Uniform:
            return VectorXd::Zero(dim());
        case PriorKind::GaussianRidge:
            return -(ridge_total_->inverse() * z);
        case PriorKind::Stein:
        case PriorKind::RescaledStein:
            // Chain rule through z' = to_eigen_ z.
            return to_eigen_.transpose() * stein_terms(z, true).grad;
        case PriorKind::Radial: {
            // The fixed draws make the estimate smooth in z.
            VectorXd g(dim());
            const double h = 1e-5 * (1.0 + z.norm());
            for (long i = 0; i < dim(); ++i) {
                VectorXd zp = z, zm = z;
                zp(i) += h;
                zm(i) -= h;
                g(i) = (radial_log_marginal(zp) - radial_log_marginal(zm)) / (2.0 * h);
            }
            return g;
        }
    }
    return VectorXd::Zero(dim());
}

double log_marginal(const MarginalEvaluator& ev, const VectorXd& z) { return ev.log_marginal(z); }

VectorXd grad_log_marginal(const MarginalEvaluator& ev, const VectorXd& z) {
    return ev.grad_log_marginal(z);
}

MarginalOracleResult log_marginal_mc_oracle(const Prior& prior, const SpdMatrix& cov,
                                            const VectorXd& z, long n, Rng& rng) {
    require_same_dim(cov.dim(), prior.dim(), "log_marginal_mc_oracle");
    require_same_dim(z.size(), prior.dim(), "log_marginal_mc_oracle");
    if (n < 1000) throw std::invalid_argument("log_marginal_mc_oracle: n must be >= 1000");
    if (prior.is_constant()) return {1.0, 0.0, 0};

    const MatrixXd& root = cov.sqrt();
    long rejected = 0;
    // Welford accumulation.
    double mean = 0.0, m2 = 0.0;
    for (long i = 0; i < n; ++i) {
        VectorXd mu = z + root * rng.normal_vector(prior.dim());
        if (prior.is_stein_type()) {
            const VectorXd probe = prior.kind() == PriorKind::RescaledStein
                                       ? VectorXd(prior.sigma_star().inv_sqrt() * mu)
                                       : mu;
            if (probe.norm() < kPoleRadius) {
                ++rejected;
                --i;
                continue;
            }
        }
        const double v = std::exp(log_prior(prior, mu));
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    const double var = m2 / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n)), rejected};
}

VectorXd posterior_mean(const MarginalEvaluator& ev, const VectorXd& y) {
    return y + ev.cov().entries() * ev.grad_log_marginal(y);
}

VectorXd posterior_mean(const Prior& prior, const VectorXd& y, const SpdMatrix& sigma) {
    if (prior.is_constant()) {
        require_same_dim(y.size(), prior.dim(), "posterior_mean");
        return y;
    }
    return posterior_mean(MarginalEvaluator(prior, sigma), y);
}

}  // namespace shrinkage
