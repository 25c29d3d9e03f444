#include "shrinkage/regression.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "shrinkage/errors.hpp"
#include "shrinkage/gaussian.hpp"

namespace shrinkage {

namespace {

// Lexicographic order of samples by (x column, y). Sorting first makes the
// reduction bit-identical under any reordering of the samples.
std::vector<long> canonical_order(const MatrixXd& x, const VectorXd& y) {
    std::vector<long> idx(static_cast<std::size_t>(x.cols()));
    std::iota(idx.begin(), idx.end(), 0L);
    std::sort(idx.begin(), idx.end(), [&](long a, long b) {
        for (long i = 0; i < x.rows(); ++i) {
            if (x(i, a) != x(i, b)) return x(i, a) < x(i, b);
        }
        return y.size() > 0 && y(a) < y(b);
    });
    return idx;
}

void require_finite(const MatrixXd& m, const char* what) {
    if (!m.allFinite()) throw NonFiniteError(std::string(what) + ": non-finite entries");
}

}  // namespace

ReducedTraining reduce(const RegressionData& data) {
    const long d = data.x.rows();
    const long p = data.x.cols();
    require_same_dim(data.y.size(), p, "reduce: targets vs design columns");
    require_finite(data.x, "reduce");
    require_finite(data.y, "reduce");
    if (!(data.sigma2 > 0.0)) throw std::invalid_argument("reduce: sigma2 must be positive");
    if (p < d) throw RankDeficient("reduce: fewer samples than dimensions (p < d)");

    const std::vector<long> order = canonical_order(data.x, data.y);
    MatrixXd x(d, p);
    VectorXd y(p);
    for (long j = 0; j < p; ++j) {
        x.col(j) = data.x.col(order[static_cast<std::size_t>(j)]);
        y(j) = data.y(order[static_cast<std::size_t>(j)]);
    }

    const MatrixXd gram_entries = symmetrized(x * x.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram_entries, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(d - 1);
    if (!(lo > 0.0) || hi / lo > kGramConditionCap) {
        throw RankDeficient("reduce: X X^T is singular or too ill-conditioned");
    }
    const SpdMatrix gram(gram_entries);
    ReducedTraining out{gram.inverse() * (x * y),
                        SpdMatrix::from_symmetric_part(data.sigma2 * gram.inverse()), hi / lo};
    return out;
}

ReducedFuture reduce_future(const FutureDesign& fd) {
    require_finite(fd.x, "reduce_future");
    if (!(fd.sigma2 > 0.0)) throw std::invalid_argument("reduce_future: sigma2 must be positive");
    if (fd.x.size() == 0 || fd.x.isZero(0.0)) {
        throw RankDeficient("reduce_future: future design carries no information (X~ = 0)");
    }
    const PsdMatrix gram = PsdMatrix::from_symmetric_part(fd.x * fd.x.transpose());
    return ReducedFuture{gram.pseudo_inverse() * fd.x,
                         PsdMatrix::from_symmetric_part(fd.sigma2 * gram.pseudo_inverse())};
}

RegressionPredictive regression_predictive_logpdf(const RegressionData& data,
                                                  const FutureDesign& fd, const Prior& prior,
                                                  const VectorXd& y_tilde) {
    require_same_dim(y_tilde.size(), fd.x.cols(), "regression_predictive_logpdf");
    require_same_dim(fd.x.rows(), data.x.rows(), "regression_predictive_logpdf");
    const ReducedTraining train = reduce(data);
    const ReducedFuture future = reduce_future(fd);
    const VectorXd y1_tilde = future.statistic(y_tilde);
    const PredictiveDensity pd(train.y1, train.sigma, future.sigma_tilde, prior);
    return RegressionPredictive{pd.logpdf(y1_tilde),
                                (y_tilde - fd.x.transpose() * y1_tilde).norm()};
}

VectorXd ridge_estimator(const RegressionData& data, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("ridge_estimator: lambda must be positive");
    require_same_dim(data.y.size(), data.x.cols(), "ridge_estimator");
    const long d = data.x.rows();
    const MatrixXd a = symmetrized(data.x * data.x.transpose()) + lambda * MatrixXd::Identity(d, d);
    return a.ldlt().solve(data.x * data.y);
}

AstarPrior astar_regression_prior(const RegressionData& data, const FutureDesign& fd) {
    require_same_dim(fd.x.rows(), data.x.rows(), "astar_regression_prior");
    const ReducedTraining train = reduce(data);
    const ReducedFuture future = reduce_future(fd);
    const SpdMatrix sigma_w = combined_covariance(train.sigma, future.sigma_tilde);
    AstarMatrix astar = build_astar(sigma_w, train.sigma);
    const long d = train.sigma.dim();
    if (astar.rank < 3) {
        throw RankDeficient("astar_regression_prior: rank(Sigma - Sigma_w) = " +
                            std::to_string(astar.rank) + " < 3");
    }
    if (astar.rank < d) {
        throw RankDeficient("astar_regression_prior: Sigma - Sigma_w is singular (rank " +
                            std::to_string(astar.rank) + " < d = " + std::to_string(d) + ")");
    }
    Prior prior = Prior::rescaled_stein(
        SpdMatrix::from_symmetric_part(train.sigma.entries() - sigma_w.entries()));
    return AstarPrior{std::move(prior), std::move(astar)};
}

MatrixXd with_intercept(const MatrixXd& x) {
    MatrixXd out(x.rows() + 1, x.cols());
    out.topRows(x.rows()) = x;
    out.row(x.rows()).setOnes();
    return out;
}

CsvDesign read_design_csv(const std::string& path, bool with_target) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t\r");
            const auto e = cell.find_last_not_of(" \t\r");
            cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
        }
        return cells;
    };

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    const std::vector<std::string> header = split(line);
    const long d = static_cast<long>(header.size()) - (with_target ? 1 : 0);
    if (d < 1) throw std::runtime_error(path + ": header has no x columns");
    for (long i = 0; i < d; ++i) {
        if (header[static_cast<std::size_t>(i)] != "x" + std::to_string(i + 1)) {
            throw std::runtime_error(path + ": expected column x" + std::to_string(i + 1));
        }
    }
    if (with_target && header.back() != "y") throw std::runtime_error(path + ": last column must be y");

    std::vector<std::vector<double>> rows;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::vector<std::string> cells = split(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": wrong number of fields");
        }
        std::vector<double> row;
        for (const auto& c : cells) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(c, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != c.size() || c.empty() || !std::isfinite(v)) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" + c + "'");
            }
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(path + ": no data rows");

    CsvDesign out;
    const long p = static_cast<long>(rows.size());
    out.x.resize(d, p);
    if (with_target) out.y.resize(p);
    for (long j = 0; j < p; ++j) {
        const auto& r = rows[static_cast<std::size_t>(j)];
        for (long i = 0; i < d; ++i) out.x(i, j) = r[static_cast<std::size_t>(i)];
        if (with_target) out.y(j) = r.back();
    }
    return out;
}

}  // namespace shrinkage
