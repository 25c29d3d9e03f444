#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "shrinkage/errors.hpp"
#include "shrinkage/gaussian.hpp"
#include "shrinkage/marginals.hpp"
#include "shrinkage/predictive.hpp"

using namespace shrinkage;
using testing::max_abs;
using testing::mean_se;
using testing::random_psd;
using testing::random_spd;

namespace {

// Normalization by importance sampling from p_I: E_{p_I}[p / p_I].
testing::MeanSe normalization(const PredictiveDensity& pd, long n, Rng& rng) {
    const long k = pd.sigma_tilde().rank();
    const MatrixXd& b = pd.sigma_tilde().range_basis();
    const MatrixXd total = b.transpose() * (pd.sigma().entries() + pd.sigma_tilde().entries()) * b;
    const SpdMatrix prop = SpdMatrix::from_symmetric_part(total);
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const VectorXd yt = pd.y() + b * (prop.sqrt() * rng.normal_vector(k));
        v.push_back(std::exp(pd.logpdf(yt) -
                             uniform_predictive_logpdf(yt, pd.y(), pd.sigma(), pd.sigma_tilde())));
    }
    return mean_se(v);
}

}  // namespace

TEST_SUITE("predictive") {

TEST_CASE("uniform prior reproduces the flat predictive") {
    Rng rng(41);
    const SpdMatrix s(random_spd(4, rng));
    const PsdMatrix st(random_spd(4, rng));
    const VectorXd y = rng.normal_vector(4);
    const PredictiveDensity pd(y, s, st, Prior::uniform(4));
    for (int i = 0; i < 10; ++i) {
        const VectorXd yt = rng.normal_vector(4);
        CHECK(pd.logpdf(yt) == doctest::Approx(uniform_predictive_logpdf(yt, y, s, st)).epsilon(1e-13));
    }
    CHECK(max_abs(pd.mean() - y) == 0.0);
}

TEST_CASE("ridge prior matches the conjugate predictive") {
    Rng rng(42);
    for (double lambda : {0.5, 10.0}) {
        const SpdMatrix s(random_spd(3, rng));
        const MatrixXd st = random_spd(3, rng);
        const VectorXd y = rng.normal_vector(3);
        const PredictiveDensity pd(y, s, PsdMatrix(st), Prior::gaussian_ridge(3, lambda));
        const MatrixXd v = (s.inverse() + lambda * MatrixXd::Identity(3, 3)).inverse();
        const VectorXd m = v * s.inverse() * y;
        const SpdMatrix cov = SpdMatrix::from_symmetric_part(st + v);
        for (int i = 0; i < 10; ++i) {
            const VectorXd yt = m + rng.normal_vector(3);
            CHECK(std::abs(pd.logpdf(yt) - gaussian_logpdf(yt, m, cov)) <= 1e-8);
        }
        CHECK(max_abs(pd.mean() - m) <= 1e-10);
    }
}

TEST_CASE("Stein predictive integrates to one") {
    Rng rng(43);
    const VectorXd y = (VectorXd(3) << 0.5, -0.2, 0.1).finished();
    const PredictiveDensity pd(y, SpdMatrix::identity(3), PsdMatrix(SpdMatrix::identity(3)), Prior::stein(3));
    const auto r = normalization(pd, 1000000, rng);
    CHECK(std::abs(r.mean - 1.0) <= 0.01);
}

TEST_CASE("every prior variant gives a normalized predictive") {
    Rng rng(44);
    const SpdMatrix s(random_spd(3, rng));
    const PsdMatrix st(random_spd(3, rng));
    const VectorXd y = rng.normal_vector(3);
    RadialProfile prof;
    prof.log_g = [](double r) { return -std::log1p(r * r); };
    prof.nonincreasing = true;
    const std::vector<Prior> priors = {Prior::uniform(3), Prior::stein(3),
                                       Prior::rescaled_stein(SpdMatrix(random_spd(3, rng))),
                                       Prior::gaussian_ridge(3, 2.0), Prior::radial(3, prof)};
    for (const Prior& prior : priors) {
        const PredictiveDensity pd(y, s, st, prior);
        const auto r = normalization(pd, 100000, rng);
        CHECK(std::abs(r.mean - 1.0) <= 3.0 * r.se + 1e-12);
    }
}

TEST_CASE("rank-deficient future covariance is normalized on its support") {
    Rng rng(45);
    const SpdMatrix s(random_spd(3, rng));
    const PsdMatrix st(random_psd(3, 2, rng));
    const PredictiveDensity pd(rng.normal_vector(3), s, st, Prior::stein(3));
    const auto r = normalization(pd, 100000, rng);
    CHECK(std::abs(r.mean - 1.0) <= 3.0 * r.se);
}

TEST_CASE("sampler mean equals the posterior mean") {
    Rng rng(46);
    const VectorXd y = (VectorXd(3) << 1.0, 0.5, -0.5).finished();
    const SpdMatrix s = SpdMatrix::identity(3);
    const PredictiveDensity pd(y, s, PsdMatrix(SpdMatrix::identity(3)), Prior::stein(3));
    const PredictiveSample draws = predictive_sample(pd, 10000, rng);
    CHECK(draws.acceptance_rate > 0.0);
    CHECK(draws.acceptance_rate <= 1.0);
    const VectorXd target = pd.mean();
    CHECK(max_abs(target - posterior_mean(Prior::stein(3), y, s)) <= 1e-12);
    for (long k = 0; k < 3; ++k) {
        std::vector<double> coord;
        for (const auto& x : draws.draws) coord.push_back(x(k));
        const auto e = mean_se(coord);
        CHECK(std::abs(e.mean - target(k)) <= 3.0 * e.se);
    }
}

TEST_CASE("uniform sampler accepts every proposal") {
    Rng rng(47);
    const PredictiveDensity pd(VectorXd::Zero(3), SpdMatrix::identity(3), PsdMatrix(SpdMatrix::identity(3)),
                               Prior::uniform(3));
    CHECK(predictive_sample(pd, 1000, rng).acceptance_rate == 1.0);
}

TEST_CASE("uniform predictive is translation invariant") {
    Rng rng(48);
    const SpdMatrix s(random_spd(3, rng));
    const PsdMatrix st(random_spd(3, rng));
    const VectorXd y = rng.normal_vector(3);
    const VectorXd yt = rng.normal_vector(3);
    const VectorXd shift = 5.0 * rng.normal_vector(3);
    const double a = PredictiveDensity(y, s, st, Prior::uniform(3)).logpdf(yt);
    const double b = PredictiveDensity(y + shift, s, st, Prior::uniform(3)).logpdf(yt + shift);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("shifting data and prior center together leaves the density unchanged") {
    Rng rng(49);
    const SpdMatrix s(random_spd(3, rng));
    const PsdMatrix st(random_spd(3, rng));
    const VectorXd y = rng.normal_vector(3);
    const VectorXd yt = rng.normal_vector(3);
    const VectorXd shift = 3.0 * rng.normal_vector(3);
    const auto make = [](const VectorXd& center) {
        RadialProfile prof;
        prof.log_g = [](double r) { return -std::log1p(r * r); };
        prof.center = center;
        prof.nonincreasing = true;
        return Prior::radial(3, prof);
    };
    const double a = PredictiveDensity(y, s, st, make(VectorXd::Zero(3))).logpdf(yt);
    const double b = PredictiveDensity(y + shift, s, st, make(shift)).logpdf(yt + shift);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("plug-in density") {
    const VectorXd m = (VectorXd(3) << 1, 2, 3).finished();
    CHECK(plugin_logpdf(m, m, PsdMatrix(SpdMatrix::identity(3))) ==
          doctest::Approx(-1.5 * std::log(2 * std::numbers::pi)));
    Rng rng(50);
    const VectorXd delta = rng.normal_vector(3);
    CHECK(gaussian_kl(m, PsdMatrix(SpdMatrix::identity(3)), m + delta, SpdMatrix::identity(3)) ==
          doctest::Approx(0.5 * delta.squaredNorm()));
}

TEST_CASE("ratio formula matches the defining integral") {
    // p(yt | y) = E[N(yt; mu, St) | y] under the posterior; estimated by
    // importance sampling mu ~ N(y, S), weights pi(mu).
    Rng rng(51);
    const SpdMatrix s(random_spd(3, rng, 0.5));
    const SpdMatrix st(random_spd(3, rng, 0.5));
    const VectorXd y = rng.normal_vector(3);
    const VectorXd yt = y + rng.normal_vector(3);
    const Prior prior = Prior::stein(3);
    const PredictiveDensity pd(y, s, PsdMatrix(st), prior);
    const long n = 400000;
    std::vector<double> num(n), den(n);
    for (long i = 0; i < n; ++i) {
        const VectorXd mu = y + s.sqrt() * rng.normal_vector(3);
        const double w = std::exp(log_prior(prior, mu));
        den[static_cast<std::size_t>(i)] = w;
        num[static_cast<std::size_t>(i)] = w * std::exp(gaussian_logpdf(yt, mu, st));
    }
    const auto a = mean_se(num);
    const auto b = mean_se(den);
    // Delta method for log(a / b), including the covariance of the two means.
    double cov = 0.0;
    for (long i = 0; i < n; ++i) {
        cov += (num[static_cast<std::size_t>(i)] - a.mean) * (den[static_cast<std::size_t>(i)] - b.mean);
    }
    cov /= static_cast<double>(n - 1) * static_cast<double>(n);
    const double var = a.se * a.se / (a.mean * a.mean) + b.se * b.se / (b.mean * b.mean) -
                       2.0 * cov / (a.mean * b.mean);
    const double direct = std::log(a.mean / b.mean);
    CHECK(std::abs(pd.logpdf(yt) - direct) <= 3.0 * std::sqrt(var));
}

TEST_CASE("draws of a rank-deficient predictive lie in the column space") {
    Rng rng(52);
    const PsdMatrix st(random_psd(3, 1, rng));
    const VectorXd y = rng.normal_vector(3);
    const PredictiveDensity pd(y, SpdMatrix::identity(3), st, Prior::stein(3));
    const PredictiveSample draws = predictive_sample(pd, 200, rng);
    for (const auto& x : draws.draws) {
        CHECK(max_abs(st.null_basis().transpose() * x) <= 1e-10);
    }
    CHECK(max_abs(st.null_basis().transpose() * pd.mean()) <= 1e-10);
}

}
