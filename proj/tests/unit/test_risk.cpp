#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "shrinkage/gaussian.hpp"
#include "shrinkage/risk.hpp"

using namespace shrinkage;
using testing::random_psd;
using testing::random_spd;

namespace {

VectorXd e1(long d, double scale = 1.0) {
    VectorXd v = VectorXd::Zero(d);
    v(0) = scale;
    return v;
}

double combined_se(const RiskEstimate& a, const RiskEstimate& b) {
    return std::hypot(a.std_error, b.std_error);
}

}  // namespace

TEST_SUITE("risk") {

TEST_CASE("summaries") {
    const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
    const RiskEstimate r = summarize(v, RiskQuantity::Risk);
    CHECK(r.mean == 2.5);
    CHECK(r.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(r.n == 4);
    CHECK_THROWS(summarize(std::vector<double>{1.0}, RiskQuantity::Risk));
    std::vector<double> many(1001);
    for (std::size_t i = 0; i < many.size(); ++i) many[i] = 0.1 * static_cast<double>(i);
    CHECK(pairwise_sum(many) == doctest::Approx(0.1 * 1000.0 * 1001.0 / 2.0).epsilon(1e-14));
}

TEST_CASE("uniform prior gives exactly zero") {
    Rng rng(61);
    const RiskEstimate phi = phi_estimate(Prior::uniform(3), e1(3), SpdMatrix::identity(3), 100, rng);
    CHECK(phi.mean == 0.0);
    CHECK(phi.std_error == 0.0);
    const RiskEstimate rd = risk_difference(Prior::uniform(4), e1(4), SpdMatrix(random_spd(4, rng)),
                                            PsdMatrix(random_spd(4, rng)), 100, rng);
    CHECK(rd.mean == 0.0);
    CHECK(rd.std_error == 0.0);
    CHECK(rd.quantity == RiskQuantity::RiskDifference);
    const RiskEstimate b = bayes_risk_difference([](const SpdMatrix&) { return Prior::uniform(3); }, e1(3),
                                                 CovarianceEnsemble::wishart_identity(3, 5),
                                                 CovarianceEnsemble::wishart_identity(3, 5), 10, 10, rng);
    CHECK(b.mean == 0.0);
    CHECK(b.std_error == 0.0);
}

TEST_CASE("ridge phi matches its closed form") {
    Rng rng(62);
    const double lambda = 3.0;
    const SpdMatrix c(random_spd(3, rng));
    const VectorXd mu = rng.normal_vector(3);
    const SpdMatrix total(MatrixXd(c.entries() + MatrixXd::Identity(3, 3) / lambda));
    const double closed =
        -0.5 * (3.0 * std::log(2 * std::numbers::pi) + total.log_det() +
                (total.inverse() * (c.entries() + mu * mu.transpose())).trace());
    const RiskEstimate est = phi_estimate(Prior::gaussian_ridge(3, lambda), mu, c, 50000, rng);
    CHECK(std::abs(est.mean - closed) <= 3.0 * est.std_error);
}

TEST_CASE("Stein phi decreases in the covariance") {
    Rng rng(63);
    const RiskEstimate d = phi_difference(Prior::stein(3), VectorXd::Zero(3), SpdMatrix::identity(3, 2.0),
                                          SpdMatrix::identity(3), 20000, rng);
    CHECK(d.mean < -3.0 * d.std_error);
}

TEST_CASE("Stein improves on the flat prior at the origin") {
    Rng rng(64);
    const RiskEstimate rd = risk_difference(Prior::stein(5), VectorXd::Zero(5), SpdMatrix::identity(5),
                                            PsdMatrix(SpdMatrix::identity(5)), 100000, rng);
    CHECK(rd.mean < -3.0 * rd.std_error);
}

TEST_CASE("more future information widens the improvement") {
    const SpdMatrix sigma = SpdMatrix::identity(3);
    Rng a(65), b(65);
    const RiskEstimate full = risk_difference(Prior::stein(3), VectorXd::Zero(3), sigma,
                                              PsdMatrix(SpdMatrix::identity(3)), 20000, a);
    const RiskEstimate half = risk_difference(Prior::stein(3), VectorXd::Zero(3), sigma,
                                              PsdMatrix(SpdMatrix::identity(3, 0.5)), 20000, b);
    CHECK(half.mean < full.mean);
}

TEST_CASE("risk difference is continuous at a semi-definite future covariance") {
    Rng rng(66);
    const SpdMatrix sigma(random_spd(3, rng));
    const MatrixXd st = random_psd(3, 2, rng);
    const VectorXd mu = rng.normal_vector(3);
    const PsdMatrix singular(st);
    Rng r0(67);
    const RiskEstimate exact = risk_difference(Prior::stein(3), mu, sigma, singular, 20000, r0);
    CHECK(std::isfinite(exact.mean));

    // Ridge regularization: the sequence settles as eps shrinks.
    const MatrixXd id = MatrixXd::Identity(3, 3);
    Rng ra(68), rb(69);
    const RiskEstimate ridge_a = risk_difference(Prior::stein(3), mu, sigma, PsdMatrix(MatrixXd(st + 1e-4 * id)), 20000, ra);
    const RiskEstimate ridge_b = risk_difference(Prior::stein(3), mu, sigma, PsdMatrix(MatrixXd(st + 1e-6 * id)), 20000, rb);
    CHECK(std::isfinite(ridge_a.mean));
    CHECK(std::abs(ridge_a.mean - ridge_b.mean) <= 3.0 * combined_se(ridge_a, ridge_b));

    // The pseudo-inverse value is the limit where the null directions carry no
    // information, i.e. their variance grows without bound.
    const MatrixXd n = singular.null_basis();
    for (double eps : {1e-4, 1e-6}) {
        Rng r(70);
        const RiskEstimate flat = risk_difference(Prior::stein(3), mu, sigma,
                                                  PsdMatrix(MatrixXd(st + (1.0 / eps) * n * n.transpose())), 20000, r);
        CHECK(std::abs(flat.mean - exact.mean) <= 3.0 * combined_se(flat, exact));
    }
}

TEST_CASE("plug-in risk is d / 2 when the covariances agree") {
    Rng rng(69);
    const double v = 2.0;
    const RiskEstimate r = direct_risk(PredictiveSpec::plugin(), e1(4), SpdMatrix::identity(4, v),
                                       PsdMatrix(SpdMatrix::identity(4, v)), 20000, 1, rng);
    CHECK(std::abs(r.mean - 2.0) <= 3.0 * r.std_error);
    const double kl = gaussian_predictive_kl(PredictiveSpec::plugin(), VectorXd::Zero(4), e1(4),
                                             SpdMatrix::identity(4, v), PsdMatrix(SpdMatrix::identity(4, v)));
    CHECK(kl == doctest::Approx(0.25));
}

TEST_CASE("flat-prior risk does not depend on the mean") {
    const SpdMatrix s = SpdMatrix::identity(3);
    const PsdMatrix st(SpdMatrix::identity(3));
    Rng a(70), b(71);
    const auto spec = PredictiveSpec::bayes(Prior::uniform(3));
    const RiskEstimate r0 = direct_risk(spec, VectorXd::Zero(3), s, st, 20000, 1, a);
    const RiskEstimate r1 = direct_risk(spec, VectorXd::Constant(3, 4.0), s, st, 20000, 1, b);
    CHECK(std::abs(r0.mean - r1.mean) <= 3.0 * combined_se(r0, r1));
    // Closed form: (d/2) log 2 for Sigma = SigmaTilde = I.
    CHECK(std::abs(r0.mean - 1.5 * std::log(2.0)) <= 3.0 * r0.std_error);
}

TEST_CASE("flat prior beats the plug-in") {
    Rng rng(72);
    const RiskEstimate d = direct_risk_difference(PredictiveSpec::plugin(), PredictiveSpec::bayes(Prior::uniform(5)),
                                                  e1(5, 2.0), SpdMatrix::identity(5),
                                                  PsdMatrix(SpdMatrix::identity(5)), 20000, 1, rng);
    CHECK(d.mean > 3.0 * d.std_error);
}

TEST_CASE("ridge predictive KL is the conjugate Gaussian divergence") {
    Rng rng(73);
    const SpdMatrix s(random_spd(3, rng));
    const PsdMatrix st(random_spd(3, rng));
    const VectorXd mu = rng.normal_vector(3);
    const VectorXd y = rng.normal_vector(3);
    const double lambda = 4.0;
    const MatrixXd v = (s.inverse() + lambda * MatrixXd::Identity(3, 3)).inverse();
    const double expected = gaussian_kl(mu, st, v * s.inverse() * y, SpdMatrix::from_symmetric_part(st.entries() + v));
    CHECK(gaussian_predictive_kl(PredictiveSpec::bayes(Prior::gaussian_ridge(3, lambda)), mu, y, s, st) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("phi identity agrees with the nested Monte Carlo risk") {
    Rng rng(74);
    const SpdMatrix sigma(random_spd(3, rng, 0.5));
    const PsdMatrix st(random_spd(3, rng, 0.5));
    const VectorXd mu = 0.5 * rng.normal_vector(3);
    const RiskEstimate phi = risk_difference(Prior::stein(3), mu, sigma, st, 20000, rng);
    const RiskEstimate direct = direct_risk_difference(PredictiveSpec::bayes(Prior::stein(3)),
                                                       PredictiveSpec::bayes(Prior::uniform(3)), mu, sigma, st,
                                                       4000, 20, rng);
    CHECK(std::abs(phi.mean - direct.mean) <= 3.0 * combined_se(phi, direct));
}

TEST_CASE("Stein nested risk is below the flat-prior risk") {
    Rng rng(75);
    const RiskEstimate d = direct_risk_difference(PredictiveSpec::bayes(Prior::stein(5)),
                                                  PredictiveSpec::bayes(Prior::uniform(5)), VectorXd::Zero(5),
                                                  SpdMatrix::identity(5), PsdMatrix(SpdMatrix::identity(5)), 2000,
                                                  20, rng);
    CHECK(d.mean < 0.0);
}

TEST_CASE("covariance ensembles") {
    Rng rng(76);
    const auto w = CovarianceEnsemble::wishart_identity(3, 5);
    MatrixXd sum = MatrixXd::Zero(3, 3);
    const int n = 20000;
    for (int i = 0; i < n; ++i) sum += w.draw(rng);
    CHECK(testing::max_abs(sum / n - MatrixXd::Identity(3, 3)) <= 0.05);

    const auto design = CovarianceEnsemble::design_induced(4, 10, 2.0, DesignDistribution::StdNormalEntries);
    for (int i = 0; i < 20; ++i) CHECK(design.draw_spd(rng).dim() == 4);
    const auto wide = CovarianceEnsemble::design_induced(4, 2, 1.0, DesignDistribution::UniformPm1);
    CHECK(wide.draw_psd(rng).rank() == 2);

    const MatrixXd x = sample_design(3, 50, DesignDistribution::UniformPm1, rng);
    CHECK(x.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("partial Bayes risk of the covariance-rescaled Stein prior") {
    Rng a(77), b(77);
    const auto factory = [](const SpdMatrix& s) { return Prior::rescaled_stein(s); };
    const auto ens = CovarianceEnsemble::wishart_identity(5, 7);
    const RiskEstimate at0 = bayes_risk_difference(factory, VectorXd::Zero(5), ens, ens, 300, 20, a);
    const RiskEstimate at2 = bayes_risk_difference(factory, e1(5, 2.0), ens, ens, 300, 20, b);
    CHECK(at0.mean < -3.0 * at0.std_error);
    CHECK(at2.mean >= at0.mean - 3.0 * combined_se(at0, at2));
}

}
