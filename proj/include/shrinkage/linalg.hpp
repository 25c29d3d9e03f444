#ifndef SHRINKAGE_LINALG_HPP
#define SHRINKAGE_LINALG_HPP

#include <Eigen/Dense>

namespace shrinkage {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Relative definiteness floor: eigenvalues below floor * largest eigenvalue
// count as zero.
inline constexpr double kDefinitenessFloor = 1e-10;

// Returns (A + A^T) / 2.
MatrixXd symmetrized(const MatrixXd& a);

/// Symmetric positive-definite matrix with its spectral data computed once
/// at construction. Eigenvalues are stored in descending order.
///
/// Construction throws DimensionMismatch for non-square input,
/// std::invalid_argument when the input is not symmetric to 1e-12 relative,
/// and NotPositiveDefinite when the smallest eigenvalue is below the floor.
class SpdMatrix {
public:
    explicit SpdMatrix(const MatrixXd& entries);

    // Symmetrizes first; for matrices that are symmetric only up to rounding
    // (products, inverses).
    static SpdMatrix from_symmetric_part(const MatrixXd& entries);
    static SpdMatrix identity(long d, double scale = 1.0);

    long dim() const { return entries_.rows(); }
    const MatrixXd& entries() const { return entries_; }
    const VectorXd& eigenvalues() const { return eigenvalues_; }
    const MatrixXd& eigenvectors() const { return eigenvectors_; }
    double log_det() const { return log_det_; }
    const MatrixXd& inverse() const { return inverse_; }
    const MatrixXd& sqrt() const { return sqrt_; }
    const MatrixXd& inv_sqrt() const { return inv_sqrt_; }

    // x^T S^{-1} x
    double inv_quad(const VectorXd& x) const;

private:
    MatrixXd entries_;
    VectorXd eigenvalues_;
    MatrixXd eigenvectors_;
    double log_det_ = 0.0;
    MatrixXd inverse_;
    MatrixXd sqrt_;
    MatrixXd inv_sqrt_;
};

/// Symmetric positive semi-definite matrix of rank k in [1, d].
///
/// support() is a d x k factor L with L L^T = entries; null_basis() holds
/// d - k orthonormal columns a_i with L^T a_i = 0. Rank detection uses the
/// relative definiteness floor.
class PsdMatrix {
public:
    explicit PsdMatrix(const MatrixXd& entries);
    static PsdMatrix from_symmetric_part(const MatrixXd& entries);
    // Full-rank view of an SPD matrix.
    explicit PsdMatrix(const SpdMatrix& spd);

    long dim() const { return entries_.rows(); }
    long rank() const { return rank_; }
    bool full_rank() const { return rank_ == dim(); }
    const MatrixXd& entries() const { return entries_; }
    const MatrixXd& support() const { return support_; }
    // Orthonormal basis of the column space (d x k).
    const MatrixXd& range_basis() const { return range_basis_; }
    const MatrixXd& null_basis() const { return null_basis_; }
    const MatrixXd& pseudo_inverse() const { return pinv_; }
    // Eigenvalues on the support, descending.
    const VectorXd& support_eigenvalues() const { return support_eigenvalues_; }
    // log of the pseudo-determinant (product of nonzero eigenvalues).
    double log_pdet() const { return log_pdet_; }

private:
    void init(const MatrixXd& entries);

    MatrixXd entries_;
    long rank_ = 0;
    MatrixXd support_;
    MatrixXd range_basis_;
    MatrixXd null_basis_;
    MatrixXd pinv_;
    VectorXd support_eigenvalues_;
    double log_pdet_ = 0.0;
};

}  // namespace shrinkage

#endif
