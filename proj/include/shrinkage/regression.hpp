#ifndef SHRINKAGE_REGRESSION_HPP
#define SHRINKAGE_REGRESSION_HPP

#include <string>

#include "shrinkage/linalg.hpp"
#include "shrinkage/predictive.hpp"
#include "shrinkage/priors.hpp"

namespace shrinkage {

inline constexpr double kGramConditionCap = 1e12;

// y = X^T beta + eps, eps ~ N(0, sigma2 I_p); X is d x p with samples as
// columns.
struct RegressionData {
    MatrixXd x;
    VectorXd y;
    double sigma2 = 1.0;
};

// Future samples y_tilde = X_tilde^T beta + eps_tilde; X_tilde is d x p_tilde
// with no rank requirement.
struct FutureDesign {
    MatrixXd x;
    double sigma2 = 1.0;
};

struct ReducedTraining {
    VectorXd y1;      // (X X^T)^{-1} X y
    SpdMatrix sigma;  // sigma2 (X X^T)^{-1}
    double gram_condition;
};

struct ReducedFuture {
    MatrixXd statistic_map;  // (X~ X~^T)^+ X~, maps y_tilde to y_tilde_1
    PsdMatrix sigma_tilde;   // sigma2~ (X~ X~^T)^+

    VectorXd statistic(const VectorXd& y_tilde) const { return statistic_map * y_tilde; }
};

// Throws RankDeficient when X X^T is singular or its condition number
// exceeds kGramConditionCap.
ReducedTraining reduce(const RegressionData& data);
// Throws RankDeficient when X_tilde = 0.
ReducedFuture reduce_future(const FutureDesign& fd);

struct RegressionPredictive {
    double logpdf;
    // || y_tilde - X~^T y_tilde_1 ||; the residual factor of the density is
    // prior-independent and left out of logpdf.
    double residual_norm;
};

// log q_pi(y_tilde_1 | y_1) of the reduced model at y_tilde_1 = statistic(y_tilde).
RegressionPredictive regression_predictive_logpdf(const RegressionData& data,
                                                  const FutureDesign& fd, const Prior& prior,
                                                  const VectorXd& y_tilde);

// (X X^T + lambda I)^{-1} X y. This is the posterior mean under
// gaussian_ridge(d, lambda / sigma2) in the reduced model.
VectorXd ridge_estimator(const RegressionData& data, double lambda);

struct AstarPrior {
    Prior prior;          // rescaled_stein(Sigma - Sigma_w)
    AstarMatrix astar;    // build_astar(Sigma_w, Sigma)
};

// Prior that depends on the future design. Throws RankDeficient unless
// Sigma - Sigma_w has full rank d (which implies rank >= 3).
AstarPrior astar_regression_prior(const RegressionData& data, const FutureDesign& fd);

// Appends a constant row to a d x p design, giving (d + 1) x p.
MatrixXd with_intercept(const MatrixXd& x);

// CSV with a header row: columns x1..xd, then y when with_target is set.
// Rows are samples. Throws std::runtime_error on malformed input.
struct CsvDesign {
    MatrixXd x;  // d x p
    VectorXd y;  // empty without target
};
CsvDesign read_design_csv(const std::string& path, bool with_target);

}  // namespace shrinkage

#endif
