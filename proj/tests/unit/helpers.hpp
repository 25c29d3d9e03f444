#ifndef SHRINKAGE_TEST_HELPERS_HPP
#define SHRINKAGE_TEST_HELPERS_HPP

#include <cmath>
#include <vector>

#include "shrinkage/linalg.hpp"
#include "shrinkage/rng.hpp"

namespace testing {

using shrinkage::MatrixXd;
using shrinkage::Rng;
using shrinkage::VectorXd;

inline MatrixXd random_spd(long d, Rng& rng, double jitter = 0.3) {
    const MatrixXd g = rng.normal_matrix(d, d);
    const MatrixXd a = g * g.transpose() / static_cast<double>(d) + jitter * MatrixXd::Identity(d, d);
    return 0.5 * (a + a.transpose());
}

inline MatrixXd random_psd(long d, long rank, Rng& rng) {
    const MatrixXd g = rng.normal_matrix(d, rank);
    const MatrixXd a = g * g.transpose();
    return 0.5 * (a + a.transpose());
}

inline MatrixXd random_orthogonal(long d, Rng& rng) {
    Eigen::HouseholderQR<MatrixXd> qr(rng.normal_matrix(d, d));
    return qr.householderQ();
}

inline double max_abs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

struct MeanSe {
    double mean;
    double se;
};

inline MeanSe mean_se(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    const double n = static_cast<double>(v.size());
    const double m = s / n;
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace testing

#endif
