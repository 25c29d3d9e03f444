#include "shrinkage/harness/selftest.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "shrinkage/errors.hpp"
#include "shrinkage/gaussian.hpp"
#include "shrinkage/harness/parallel.hpp"
#include "shrinkage/marginals.hpp"
#include "shrinkage/predictive.hpp"
#include "shrinkage/priors.hpp"
#include "shrinkage/regression.hpp"
#include "shrinkage/risk.hpp"
#include "shrinkage/rng.hpp"

namespace shrinkage::harness {

namespace {

constexpr std::uint64_t kSelfTestSalt = 0x5e1f;

MatrixXd random_spd(long d, Rng& rng, double jitter = 0.3) {
    const MatrixXd g = rng.normal_matrix(d, d);
    return symmetrized(g * g.transpose() / static_cast<double>(d) + jitter * MatrixXd::Identity(d, d));
}

CheckResult make(const std::string& name, double stat, double threshold, long n, bool below = true) {
    CheckResult c;
    c.name = name;
    c.statistic = stat;
    c.threshold = threshold;
    c.n = n;
    c.passed = std::isfinite(stat) && (below ? stat <= threshold : stat >= threshold);
    std::ostringstream os;
    os << "statistic " << stat << (below ? " <= " : " >= ") << threshold;
    c.detail = os.str();
    return c;
}

CheckResult stein_marginal_origin(Rng&) {
    const MarginalEvaluator ev(Prior::stein(3), SpdMatrix::identity(3));
    const double m = std::exp(ev.log_marginal(VectorXd::Zero(3)));
    return make("stein_marginal_origin", std::abs(m - std::sqrt(2.0 / std::numbers::pi)), 1e-6, 1);
}

CheckResult marginal_quadrature_vs_mc(Rng& rng) {
    double worst = 0.0;
    const int points = 6;
    for (int i = 0; i < points; ++i) {
        const SpdMatrix c(random_spd(3, rng));
        const Prior prior = i % 2 == 0 ? Prior::stein(3) : Prior::rescaled_stein(SpdMatrix(random_spd(3, rng)));
        const VectorXd z = rng.normal_vector(3);
        const double quad = std::exp(MarginalEvaluator(prior, c).log_marginal(z));
        const MarginalOracleResult mc = log_marginal_mc_oracle(prior, c, z, 200000, rng);
        worst = std::max(worst, std::abs(quad - mc.estimate) / mc.std_error);
    }
    return make("marginal_quadrature_vs_mc", worst, 4.0, points);
}

CheckResult marginal_far_field(Rng& rng) {
    const MarginalEvaluator ev(Prior::stein(5), SpdMatrix::identity(5));
    VectorXd z = rng.normal_vector(5);
    z *= 50.0 / z.norm();
    return make("marginal_far_field", std::abs(ev.log_marginal(z) + 3.0 * std::log(50.0)), 1e-3, 1);
}

CheckResult grad_vs_finite_difference(Rng& rng) {
    double worst = 0.0;
    const MarginalEvaluator ev(Prior::stein(5), SpdMatrix(random_spd(5, rng)));
    for (int i = 0; i < 5; ++i) {
        const VectorXd z = rng.normal_vector(5);
        const VectorXd g = ev.grad_log_marginal(z);
        for (long k = 0; k < 5; ++k) {
            VectorXd zp = z, zm = z;
            zp(k) += 1e-4;
            zm(k) -= 1e-4;
            const double fd = (ev.log_marginal(zp) - ev.log_marginal(zm)) / 2e-4;
            worst = std::max(worst, std::abs(fd - g(k)));
        }
    }
    return make("grad_vs_finite_difference", worst, 1e-5, 25);
}

// Direct evaluation of int N(yt; mu, St) N(y; mu, S) pi(mu) / int N(y; mu, S) pi(mu)
// by averaging over mu ~ N(y, S).
CheckResult ratio_vs_direct(Rng& rng) {
    double worst = 0.0;
    const long n = 200000;
    for (int trial = 0; trial < 3; ++trial) {
        const SpdMatrix s(random_spd(3, rng));
        const SpdMatrix st(random_spd(3, rng));
        const VectorXd y = rng.normal_vector(3);
        const VectorXd yt = y + rng.normal_vector(3);
        const Prior prior = Prior::stein(3);
        const PredictiveDensity pd(y, s, PsdMatrix(st), prior);
        const double ratio_path = pd.logpdf(yt);

        double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
        for (long i = 0; i < n; ++i) {
            const VectorXd mu = y + s.sqrt() * rng.normal_vector(3);
            const double b = std::pow(mu.norm(), -1.0);
            const double a = std::exp(gaussian_logpdf(yt, mu, st)) * b;
            sa += a;
            sb += b;
            saa += a * a;
            sbb += b * b;
            sab += a * b;
        }
        const double nn = static_cast<double>(n);
        const double ma = sa / nn, mb = sb / nn;
        const double va = saa / nn - ma * ma, vb = sbb / nn - mb * mb, cab = sab / nn - ma * mb;
        const double se = std::sqrt((va / (ma * ma) + vb / (mb * mb) - 2.0 * cab / (ma * mb)) / nn);
        worst = std::max(worst, std::abs(std::log(ma / mb) - ratio_path) / se);
    }
    return make("ratio_formula_vs_direct", worst, 4.0, 3);
}

CheckResult ridge_predictive_conjugate(Rng& rng) {
    double worst = 0.0;
    const long d = 4;
    const double lambda = 2.5;
    const SpdMatrix s(random_spd(d, rng));
    const SpdMatrix st(random_spd(d, rng));
    const VectorXd y = rng.normal_vector(d);
    const PredictiveDensity pd(y, s, PsdMatrix(st), Prior::gaussian_ridge(d, lambda));
    const SpdMatrix prec = SpdMatrix::from_symmetric_part(s.inverse() + lambda * MatrixXd::Identity(d, d));
    const VectorXd mean = prec.inverse() * (s.inverse() * y);
    const SpdMatrix cov = SpdMatrix::from_symmetric_part(st.entries() + prec.inverse());
    for (int i = 0; i < 10; ++i) {
        const VectorXd yt = y + 2.0 * rng.normal_vector(d);
        worst = std::max(worst, std::abs(pd.logpdf(yt) - gaussian_logpdf(yt, mean, cov)));
    }
    return make("ridge_predictive_conjugate", worst, 1e-8, 10);
}

CheckResult heat_identity(Rng& rng) {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const VectorXd mu = rng.normal_vector(3);
        const VectorXd x = mu + rng.normal_vector(3);
        VectorXd a(3);
        for (long k = 0; k < 3; ++k) a(k) = rng.uniform(0.5, 2.0);
        const HeatIdentity h = diagonal_heat_identity(x, mu, a);
        worst = std::max(worst, std::abs(h.diagonal_derivative_sum - h.half_laplacian) /
                                    std::max(std::abs(h.half_laplacian), 1e-300));
    }
    return make("heat_identity", worst, 1e-4, 10);
}

CheckResult astar_product(Rng& rng) {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const MatrixXd s1 = random_spd(4, rng);
        const MatrixXd b = rng.normal_matrix(4, 4);
        const MatrixXd s2 = symmetrized(s1 + b * b.transpose());
        const AstarMatrix a = build_astar(SpdMatrix(s1), SpdMatrix(s2));
        const MatrixXd diff = a.a_star * a.a_star.transpose() - (s2 - s1);
        worst = std::max(worst, diff.cwiseAbs().maxCoeff() / s2.cwiseAbs().maxCoeff());
    }
    return make("astar_product", worst, 1e-10, 20);
}

CheckResult rescaled_identity(Rng& rng) {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const MatrixXd s1 = random_spd(3, rng);
        const MatrixXd b = rng.normal_matrix(3, 3);
        const MatrixXd s2 = symmetrized(s1 + b * b.transpose());
        const auto [lhs, rhs] =
            rescaled_stein_identity_check(SpdMatrix(s1), SpdMatrix(s2), rng.normal_vector(3));
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return make("rescaled_stein_identity", worst, 1e-9, 20);
}

CheckResult risk_identity(Rng& rng) {
    double worst = 0.0;
    for (int trial = 0; trial < 2; ++trial) {
        const SpdMatrix s(random_spd(3, rng));
        const PsdMatrix st(SpdMatrix(random_spd(3, rng)));
        const VectorXd mu = 0.5 * rng.normal_vector(3);
        const Prior prior = Prior::stein(3);
        const RiskEstimate phi = risk_difference(prior, mu, s, st, 20000, rng);
        const RiskEstimate direct = direct_risk_difference(PredictiveSpec::bayes(prior),
                                                           PredictiveSpec::bayes(Prior::uniform(3)),
                                                           mu, s, st, 400, 10, rng);
        const double se = std::hypot(phi.std_error, direct.std_error);
        worst = std::max(worst, std::abs(phi.mean - direct.mean) / se);
    }
    return make("risk_identity", worst, 4.0, 2);
}

CheckResult sampler_mean(Rng& rng) {
    const VectorXd y = (VectorXd(3) << 1.0, 0.5, -0.3).finished();
    const PredictiveDensity pd(y, SpdMatrix::identity(3), PsdMatrix(SpdMatrix::identity(3)),
                               Prior::stein(3));
    const long n = 4000;
    const PredictiveSample s = predictive_sample(pd, n, rng);
    const VectorXd target = pd.mean();
    double worst = 0.0;
    for (long k = 0; k < 3; ++k) {
        std::vector<double> v;
        for (const auto& x : s.draws) v.push_back(x(k));
        const RiskEstimate e = summarize(v, RiskQuantity::Risk);
        worst = std::max(worst, std::abs(e.mean - target(k)) / e.std_error);
    }
    return make("sampler_mean", worst, 4.0, n);
}

CheckResult predictive_normalization(Rng& rng) {
    const VectorXd y = (VectorXd(3) << 0.3, -0.2, 0.1).finished();
    const SpdMatrix s = SpdMatrix::identity(3);
    const PsdMatrix st(SpdMatrix::identity(3));
    const PredictiveDensity pd(y, s, st, Prior::stein(3));
    const long n = 100000;
    std::vector<double> w(static_cast<std::size_t>(n));
    const SpdMatrix total = SpdMatrix::identity(3, 2.0);
    for (auto& v : w) {
        const VectorXd yt = y + total.sqrt() * rng.normal_vector(3);
        v = std::exp(pd.logpdf(yt) - uniform_predictive_logpdf(yt, y, s, st));
    }
    const RiskEstimate e = summarize(w, RiskQuantity::Risk);
    return make("predictive_normalization", std::abs(e.mean - 1.0) / e.std_error, 4.0, n);
}

CheckResult ridge_estimator_equivalence(Rng& rng) {
    const MatrixXd x = rng.normal_matrix(4, 12);
    const VectorXd y = rng.normal_vector(12);
    const double sigma2 = 2.0, lambda = 3.0;
    const RegressionData data{x, y, sigma2};
    const ReducedTraining t = reduce(data);
    const VectorXd post = posterior_mean(Prior::gaussian_ridge(4, lambda / sigma2), t.y1, t.sigma);
    return make("ridge_estimator_equivalence", (post - ridge_estimator(data, lambda)).cwiseAbs().maxCoeff(),
                1e-8, 1);
}

CheckResult finiteness_guard(Rng& rng) {
    long failures = 0, evaluated = 0;
    for (long d = 3; d <= 9; ++d) {
        RadialProfile profile;
        profile.log_g = [](double r) { return -0.5 * r * r; };
        profile.nonincreasing = true;
        const std::vector<Prior> priors = {
            Prior::uniform(d), Prior::stein(d), Prior::rescaled_stein(SpdMatrix(random_spd(d, rng))),
            Prior::gaussian_ridge(d, 10.0), Prior::radial(d, profile)};
        const SpdMatrix c(random_spd(d, rng));
        for (const auto& p : priors) {
            const MarginalEvaluator ev(p, c);
            for (double r : {0.0, 1.0, 1e3}) {
                VectorXd z = rng.normal_vector(d);
                z *= r / z.norm();
                ++evaluated;
                try {
                    if (!std::isfinite(ev.log_marginal(z))) ++failures;
                } catch (const std::exception&) {
                    ++failures;
                }
            }
        }
    }
    return make("finiteness_guard", static_cast<double>(failures), 0.0, evaluated);
}

CheckResult uniform_zero_difference(Rng& rng) {
    const SpdMatrix s(random_spd(3, rng));
    const PsdMatrix st(SpdMatrix(random_spd(3, rng)));
    const RiskEstimate e = risk_difference(Prior::uniform(3), rng.normal_vector(3), s, st, 100, rng);
    return make("uniform_zero_difference", std::abs(e.mean) + e.std_error, 0.0, e.n);
}

CheckResult kl_vs_mc(Rng& rng) {
    const VectorXd zero = VectorXd::Zero(3);
    const SpdMatrix s1 = SpdMatrix::identity(3);
    const SpdMatrix s2 = SpdMatrix::identity(3, 2.0);
    const double kl = gaussian_kl(zero, PsdMatrix(s1), zero, s2);
    const long n = 200000;
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) {
        const VectorXd z = rng.normal_vector(3);
        x = gaussian_logpdf(z, zero, s1) - gaussian_logpdf(z, zero, s2);
    }
    const RiskEstimate e = summarize(v, RiskQuantity::Risk);
    return make("gaussian_kl_vs_mc", std::abs(e.mean - kl) / e.std_error, 4.0, n);
}

struct Check {
    const char* name;
    std::function<CheckResult(Rng&)> run;
};

const std::vector<Check>& checks() {
    static const std::vector<Check> all = {
        {"stein_marginal_origin", stein_marginal_origin},
        {"marginal_quadrature_vs_mc", marginal_quadrature_vs_mc},
        {"marginal_far_field", marginal_far_field},
        {"grad_vs_finite_difference", grad_vs_finite_difference},
        {"ratio_formula_vs_direct", ratio_vs_direct},
        {"ridge_predictive_conjugate", ridge_predictive_conjugate},
        {"heat_identity", heat_identity},
        {"astar_product", astar_product},
        {"rescaled_stein_identity", rescaled_identity},
        {"risk_identity", risk_identity},
        {"sampler_mean", sampler_mean},
        {"predictive_normalization", predictive_normalization},
        {"ridge_estimator_equivalence", ridge_estimator_equivalence},
        {"finiteness_guard", finiteness_guard},
        {"uniform_zero_difference", uniform_zero_difference},
        {"gaussian_kl_vs_mc", kl_vs_mc},
    };
    return all;
}

}  // namespace

std::vector<std::string> selftest_suite() {
    std::vector<std::string> names;
    for (const auto& c : checks()) names.emplace_back(c.name);
    return names;
}

std::vector<CheckResult> run_selftest(std::uint64_t seed, unsigned workers) {
    const auto& all = checks();
    std::vector<CheckResult> out(all.size());
    parallel_for(all.size(), workers, [&](std::size_t i) {
        Rng rng = seed_substream(seed, {kSelfTestSalt, i});
        try {
            out[i] = all[i].run(rng);
        } catch (const std::exception& ex) {
            out[i].name = all[i].name;
            out[i].passed = false;
            out[i].detail = std::string("exception: ") + ex.what();
        }
    });
    return out;
}

}  // namespace shrinkage::harness
