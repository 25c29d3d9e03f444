#include "shrinkage/linalg.hpp"

#include <cmath>
#include <string>

#include "shrinkage/errors.hpp"

namespace shrinkage {

namespace {

void require_square(const MatrixXd& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw DimensionMismatch(std::string(what) + ": expected a non-empty square matrix, got " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
}

void require_symmetric(const MatrixXd& a, const char* what) {
    if (!a.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": non-finite entries");
    }
    const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale) {
        throw std::invalid_argument(std::string(what) + ": matrix is not symmetric");
    }
}

// Eigen returns ascending eigenvalues; flip to descending.
void descending_eigen(const MatrixXd& a, VectorXd& values, MatrixXd& vectors) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
    if (es.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition failed");
    }
    values = es.eigenvalues().reverse();
    vectors = es.eigenvectors().rowwise().reverse();
}

}  // namespace

MatrixXd symmetrized(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

SpdMatrix::SpdMatrix(const MatrixXd& entries) : entries_(entries) {
    require_square(entries_, "SpdMatrix");
    require_symmetric(entries_, "SpdMatrix");
    entries_ = symmetrized(entries_);
    descending_eigen(entries_, eigenvalues_, eigenvectors_);
    const double top = eigenvalues_(0);
    const double bottom = eigenvalues_(eigenvalues_.size() - 1);
    if (!(top > 0.0) || bottom <= kDefinitenessFloor * top) {
        throw NotPositiveDefinite("SpdMatrix: smallest eigenvalue " + std::to_string(bottom) +
                                  " is below the definiteness floor");
    }
    log_det_ = eigenvalues_.array().log().sum();
    const MatrixXd& v = eigenvectors_;
    inverse_ = symmetrized(v * eigenvalues_.cwiseInverse().asDiagonal() * v.transpose());
    sqrt_ = symmetrized(v * eigenvalues_.cwiseSqrt().asDiagonal() * v.transpose());
    inv_sqrt_ = symmetrized(v * eigenvalues_.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose());
}

SpdMatrix SpdMatrix::from_symmetric_part(const MatrixXd& entries) {
    require_square(entries, "SpdMatrix");
    return SpdMatrix(symmetrized(entries));
}

SpdMatrix SpdMatrix::identity(long d, double scale) {
    return SpdMatrix(scale * MatrixXd::Identity(d, d));
}

double SpdMatrix::inv_quad(const VectorXd& x) const {
    require_same_dim(x.size(), dim(), "SpdMatrix::inv_quad");
    const VectorXd proj = eigenvectors_.transpose() * x;
    return (proj.array().square() / eigenvalues_.array()).sum();
}

PsdMatrix::PsdMatrix(const MatrixXd& entries) { init(entries); }

PsdMatrix::PsdMatrix(const SpdMatrix& spd) { init(spd.entries()); }

PsdMatrix PsdMatrix::from_symmetric_part(const MatrixXd& entries) {
    require_square(entries, "PsdMatrix");
    return PsdMatrix(symmetrized(entries));
}

void PsdMatrix::init(const MatrixXd& entries) {
    require_square(entries, "PsdMatrix");
    require_symmetric(entries, "PsdMatrix");
    entries_ = symmetrized(entries);
    VectorXd values;
    MatrixXd vectors;
    descending_eigen(entries_, values, vectors);
    const double top = values(0);
    if (!(top > 0.0)) {
        throw RankDeficient("PsdMatrix: matrix has rank 0");
    }
    const double floor = kDefinitenessFloor * top;
    if (values(values.size() - 1) < -1e-8 * top) {
        throw NotPositiveDefinite("PsdMatrix: matrix has a negative eigenvalue");
    }
    rank_ = 0;
    while (rank_ < values.size() && values(rank_) > floor) {
        ++rank_;
    }
    const long d = dim();
    support_eigenvalues_ = values.head(rank_);
    range_basis_ = vectors.leftCols(rank_);
    null_basis_ = vectors.rightCols(d - rank_);
    support_ = range_basis_ * support_eigenvalues_.cwiseSqrt().asDiagonal();
    pinv_ = symmetrized(range_basis_ * support_eigenvalues_.cwiseInverse().asDiagonal() *
                        range_basis_.transpose());
    log_pdet_ = support_eigenvalues_.array().log().sum();
}

}  // namespace shrinkage
