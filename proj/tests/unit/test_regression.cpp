#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "helpers.hpp"
#include "shrinkage/errors.hpp"
#include "shrinkage/gaussian.hpp"
#include "shrinkage/marginals.hpp"
#include "shrinkage/regression.hpp"
#include "shrinkage/risk.hpp"

using namespace shrinkage;
using testing::max_abs;

namespace {

RegressionData triangle_data() {
    const double c = std::sqrt(3.0) / 2.0;
    RegressionData data;
    data.x = MatrixXd(3, 3);
    data.x << c, c, 0,
              0.5, -0.5, 0,
              0, 0, 1;
    data.y = (VectorXd(3) << c + 0.5, c - 0.5, 0.0).finished();
    return data;
}

RegressionData synthetic_data(long d, long p, double sigma2, Rng& rng) {
    RegressionData data{sample_design(d, p, DesignDistribution::StdNormalEntries, rng), VectorXd(), sigma2};
    data.y = data.x.transpose() * rng.normal_vector(d) + std::sqrt(sigma2) * rng.normal_vector(p);
    return data;
}

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << body;
    return path;
}

}  // namespace

TEST_SUITE("regression") {

TEST_CASE("the three-point data set has least-squares fit (1, 1, 0)") {
    const ReducedTraining r = reduce(triangle_data());
    CHECK(max_abs(r.y1 - Eigen::Vector3d(1, 1, 0)) <= 1e-10);
}

TEST_CASE("identity design passes the data through") {
    RegressionData data{MatrixXd::Identity(3, 3), Eigen::Vector3d(0.5, -1, 2), 2.0};
    const ReducedTraining r = reduce(data);
    CHECK(max_abs(r.y1 - data.y) <= 1e-15);
    CHECK(max_abs(r.sigma.entries() - 2.0 * MatrixXd::Identity(3, 3)) <= 1e-15);
    CHECK(r.gram_condition == doctest::Approx(1.0));
}

TEST_CASE("least-squares residuals are orthogonal to the design") {
    Rng rng(81);
    for (int i = 0; i < 10; ++i) {
        const RegressionData data = synthetic_data(4, 12, 1.5, rng);
        const ReducedTraining r = reduce(data);
        const VectorXd normal = data.x * (data.y - data.x.transpose() * r.y1);
        CHECK(normal.norm() <= 1e-8 * (data.x * data.y).norm());
    }
}

TEST_CASE("reduction rejects degenerate designs") {
    RegressionData wide{MatrixXd::Identity(3, 2), VectorXd::Zero(2), 1.0};
    CHECK_THROWS_AS(reduce(wide), RankDeficient);
    MatrixXd x = MatrixXd::Ones(3, 5);
    CHECK_THROWS_AS(reduce(RegressionData{x, VectorXd::Zero(5), 1.0}), RankDeficient);
    CHECK_THROWS_AS(reduce(RegressionData{MatrixXd::Identity(3, 3), VectorXd::Zero(4), 1.0}), DimensionMismatch);
    CHECK_THROWS_AS(reduce_future(FutureDesign{MatrixXd::Zero(3, 2), 1.0}), RankDeficient);
}

TEST_CASE("reduction is unchanged by reordering samples") {
    Rng rng(82);
    const RegressionData data = synthetic_data(3, 9, 1.0, rng);
    std::vector<long> perm(9);
    std::iota(perm.begin(), perm.end(), 0L);
    std::reverse(perm.begin(), perm.end());
    std::swap(perm[1], perm[5]);
    RegressionData shuffled = data;
    for (long j = 0; j < 9; ++j) {
        shuffled.x.col(j) = data.x.col(perm[static_cast<std::size_t>(j)]);
        shuffled.y(j) = data.y(perm[static_cast<std::size_t>(j)]);
    }
    const ReducedTraining a = reduce(data);
    const ReducedTraining b = reduce(shuffled);
    CHECK((a.y1.array() == b.y1.array()).all());
    CHECK((a.sigma.entries().array() == b.sigma.entries().array()).all());
}

TEST_CASE("future reductions") {
    MatrixXd x1 = MatrixXd::Zero(3, 1);
    x1(0, 0) = 1.0;
    const ReducedFuture f1 = reduce_future(FutureDesign{x1, 1.0});
    CHECK(f1.sigma_tilde.rank() == 1);
    CHECK(max_abs(f1.sigma_tilde.entries() - x1 * x1.transpose()) <= 1e-15);

    Rng rng(83);
    const MatrixXd sq = rng.normal_matrix(3, 3);
    const ReducedFuture fs = reduce_future(FutureDesign{sq, 2.0});
    CHECK(max_abs(fs.sigma_tilde.entries() - 2.0 * (sq * sq.transpose()).inverse()) <= 1e-9);

    const VectorXd pt = rng.normal_vector(3);
    const ReducedFuture fp = reduce_future(FutureDesign{pt, 3.0});
    CHECK(max_abs(fp.sigma_tilde.entries() - 3.0 * pt * pt.transpose() / std::pow(pt.squaredNorm(), 2)) <= 1e-12);

    MatrixXd dup(3, 2);
    dup << x1, x1;
    const ReducedFuture fd = reduce_future(FutureDesign{dup, 1.0});
    const MatrixXd prod = fd.sigma_tilde.entries() * (dup * dup.transpose());
    CHECK(max_abs(prod * prod - prod) <= 1e-12);
    CHECK(max_abs(fd.sigma_tilde.entries() - 0.5 * x1 * x1.transpose()) <= 1e-15);
}

TEST_CASE("duplicating the future design halves the future covariance") {
    Rng rng(84);
    for (long pt : {1L, 2L, 5L}) {
        const MatrixXd xt = rng.normal_matrix(4, pt);
        MatrixXd twice(4, 2 * pt);
        twice << xt, xt;
        const ReducedFuture a = reduce_future(FutureDesign{xt, 1.7});
        const ReducedFuture b = reduce_future(FutureDesign{twice, 1.7});
        CHECK(max_abs(b.sigma_tilde.entries() - 0.5 * a.sigma_tilde.entries()) <=
              1e-10 * max_abs(a.sigma_tilde.entries()));
    }
}

TEST_CASE("flat-prior regression predictive passes through") {
    RegressionData data{MatrixXd::Identity(3, 3), Eigen::Vector3d(1, 2, 3), 1.0};
    const FutureDesign fd{MatrixXd::Identity(3, 3), 1.0};
    const VectorXd yt = Eigen::Vector3d(0.5, 0.5, 0.5);
    const RegressionPredictive r = regression_predictive_logpdf(data, fd, Prior::uniform(3), yt);
    CHECK(r.logpdf == doctest::Approx(uniform_predictive_logpdf(yt, data.y, SpdMatrix::identity(3),
                                                                PsdMatrix(SpdMatrix::identity(3))))
                          .epsilon(1e-14));
    CHECK(r.residual_norm <= 1e-14);
}

TEST_CASE("per-draw flat-prior KL is the same on raw and reduced data") {
    Rng rng(85);
    for (long pt : {2L, 3L, 7L}) {
        const double s2 = 1.3, st2 = 0.8;
        const RegressionData data = synthetic_data(3, 8, s2, rng);
        const MatrixXd xt = rng.normal_matrix(3, pt);
        const VectorXd beta = rng.normal_vector(3);
        const ReducedTraining train = reduce(data);
        const ReducedFuture future = reduce_future(FutureDesign{xt, st2});
        // Raw space: y_tilde ~ N(Xt^T beta, st2 I), predictive N(Xt^T y1, st2 I + Xt^T Sigma Xt).
        const MatrixXd raw_cov = st2 * MatrixXd::Identity(pt, pt) + xt.transpose() * train.sigma.entries() * xt;
        const double raw = gaussian_kl(xt.transpose() * beta, PsdMatrix(SpdMatrix::identity(pt, st2)),
                                       xt.transpose() * train.y1, SpdMatrix::from_symmetric_part(raw_cov));
        const double reduced = gaussian_predictive_kl(PredictiveSpec::bayes(Prior::uniform(3)), beta, train.y1,
                                                      train.sigma, future.sigma_tilde);
        CHECK(std::abs(raw - reduced) <= 1e-8 * (1.0 + std::abs(raw)));
    }
}

TEST_CASE("ridge estimator") {
    RegressionData id{MatrixXd::Identity(3, 3), Eigen::Vector3d(2, -4, 6), 1.0};
    CHECK(max_abs(ridge_estimator(id, 1.0) - id.y / 2.0) <= 1e-15);
    Rng rng(86);
    const RegressionData data = synthetic_data(4, 10, 2.5, rng);
    const ReducedTraining r = reduce(data);
    CHECK(max_abs(ridge_estimator(data, 1e-10) - r.y1) <= 1e-8);
    CHECK(max_abs(ridge_estimator(data, 1e-8) - r.y1) <= 1e-6);
    CHECK_THROWS(ridge_estimator(data, 0.0));
    for (double lambda : {0.3, 10.0}) {
        const VectorXd post = posterior_mean(Prior::gaussian_ridge(4, lambda / data.sigma2), r.y1, r.sigma);
        CHECK(max_abs(post - ridge_estimator(data, lambda)) <= 1e-8);
    }
}

TEST_CASE("covariance-rescaled Stein posterior shrinks the fitted slope") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng = seed_substream(99, {seed});
        const long d = 5, p = 10;
        RegressionData data{sample_design(d, p, DesignDistribution::UniformPm1, rng), VectorXd(), 1.0};
        VectorXd beta = VectorXd::Zero(d);
        beta(0) = 1.0;
        data.y = data.x.transpose() * beta + rng.normal_vector(p);
        const ReducedTraining r = reduce(data);
        const VectorXd stein = posterior_mean(Prior::rescaled_stein(r.sigma), r.y1, r.sigma);
        CHECK(std::abs(stein(0)) < std::abs(r.y1(0)));
    }
}

TEST_CASE("A* prior for a regression problem") {
    Rng rng(87);
    const RegressionData data = synthetic_data(3, 8, 1.0, rng);
    const FutureDesign fd{rng.normal_matrix(3, 4), 0.7};
    const AstarPrior ap = astar_regression_prior(data, fd);
    const ReducedTraining train = reduce(data);
    const SpdMatrix sw = combined_covariance(train.sigma, reduce_future(fd).sigma_tilde);
    const MatrixXd gap = train.sigma.entries() - sw.entries();
    CHECK(max_abs(ap.astar.a_star * ap.astar.a_star.transpose() - gap) <= 1e-10 * (1.0 + max_abs(gap)));
    for (int i = 0; i < 10; ++i) {
        const VectorXd beta = rng.normal_vector(3);
        CHECK(std::abs(log_prior(ap.prior, ap.astar.a_star * beta) - log_prior(Prior::stein(3), beta)) <= 1e-9);
    }
}

TEST_CASE("A* prior with a proportional future covariance is the covariance-rescaled prior") {
    Rng rng(88);
    const RegressionData data = synthetic_data(4, 9, 1.0, rng);
    const FutureDesign fd{2.0 * data.x, 1.0};
    const AstarPrior ap = astar_regression_prior(data, fd);
    const Prior ref = Prior::rescaled_stein(reduce(data).sigma);
    const VectorXd b0 = rng.normal_vector(4);
    for (int i = 0; i < 5; ++i) {
        const VectorXd b = rng.normal_vector(4);
        CHECK(std::abs((log_prior(ap.prior, b) - log_prior(ap.prior, b0)) -
                       (log_prior(ref, b) - log_prior(ref, b0))) <= 1e-9);
    }
}

TEST_CASE("A* prior needs three informative future directions") {
    Rng rng(89);
    const RegressionData data = synthetic_data(3, 8, 1.0, rng);
    CHECK_THROWS_AS(astar_regression_prior(data, FutureDesign{rng.normal_matrix(3, 1), 1.0}), RankDeficient);
    CHECK_THROWS_AS(astar_regression_prior(data, FutureDesign{rng.normal_matrix(3, 2), 1.0}), RankDeficient);
    CHECK_NOTHROW(astar_regression_prior(data, FutureDesign{rng.normal_matrix(3, 3), 1.0}));
}

TEST_CASE("intercept row") {
    const MatrixXd x = MatrixXd::Constant(2, 3, 5.0);
    const MatrixXd xi = with_intercept(x);
    CHECK(xi.rows() == 3);
    CHECK(xi.row(2).isOnes());
    CHECK(xi.topRows(2) == x);
}

TEST_CASE("design CSV input") {
    const auto good = write_temp("shrinkage_good.csv", "x1,x2,y\n1,2,3\n4, 5 ,6\n\n7,8,9\n");
    const CsvDesign c = read_design_csv(good.string(), true);
    CHECK(c.x.rows() == 2);
    CHECK(c.x.cols() == 3);
    CHECK(c.x(1, 1) == 5.0);
    CHECK(c.y(2) == 9.0);
    const auto fut = write_temp("shrinkage_future.csv", "x1,x2\n1,0\n");
    CHECK(read_design_csv(fut.string(), false).x.cols() == 1);
    CHECK_THROWS(read_design_csv(write_temp("shrinkage_bad1.csv", "x1,y\n1,abc\n").string(), true));
    CHECK_THROWS(read_design_csv(write_temp("shrinkage_bad2.csv", "x2,y\n1,2\n").string(), true));
    CHECK_THROWS(read_design_csv(write_temp("shrinkage_bad3.csv", "x1,y\n1\n").string(), true));
    CHECK_THROWS(read_design_csv(write_temp("shrinkage_bad4.csv", "x1,y\n").string(), true));
    CHECK_THROWS(read_design_csv("/nonexistent/shrinkage.csv", true));
}

}
