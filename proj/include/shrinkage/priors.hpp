#ifndef SHRINKAGE_PRIORS_HPP
#define SHRINKAGE_PRIORS_HPP

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shrinkage/linalg.hpp"

namespace shrinkage {

enum class PriorKind { Uniform, Stein, RescaledStein, GaussianRidge, Radial };

// pi(mu) = g(||mu - center||), supplied as log g.
struct RadialProfile {
    std::function<double(double)> log_g;
    VectorXd center;
    // Declared by the caller; the rejection sampler relies on it.
    bool nonincreasing = false;
    std::string label = "radial";
};

/// A prior density on the mean, represented by its log-density up to an
/// additive constant that is fixed per variant. Every quantity the library
/// exposes downstream (predictive ratio, risk differences) is invariant to
/// that constant.
class Prior {
public:
    static Prior uniform(long d);
    // ||mu||^{-(d-2)}; requires d >= 3.
    static Prior stein(long d);
    // ||sigma_star^{-1/2} mu||^{-(d-2)}; requires d >= 3.
    static Prior rescaled_stein(SpdMatrix sigma_star);
    // N(0, lambda^{-1} I), normalized.
    static Prior gaussian_ridge(long d, double lambda);
    static Prior radial(long d, RadialProfile profile);

    PriorKind kind() const { return kind_; }
    long dim() const { return dim_; }
    double lambda() const { return lambda_; }
    const SpdMatrix& sigma_star() const;
    const RadialProfile& radial_profile() const;

    bool is_stein_type() const {
        return kind_ == PriorKind::Stein || kind_ == PriorKind::RescaledStein;
    }
    bool is_constant() const { return kind_ == PriorKind::Uniform; }
    // The marginal m(w; C) is maximized at center() for every C.
    bool supports_rejection_bound() const;
    VectorXd center() const;
    std::string name() const;

private:
    Prior(PriorKind kind, long dim) : kind_(kind), dim_(dim) {}

    PriorKind kind_;
    long dim_;
    double lambda_ = 0.0;
    std::optional<SpdMatrix> sigma_star_;
    std::optional<RadialProfile> radial_;
};

// Throws PoleError at mu = 0 for Stein variants.
double log_prior(const Prior& prior, const VectorXd& mu);

/// Factor A* = Sigma1^{1/2} U^T (Lambda^{-1} - I)^{1/2} of Sigma2 - Sigma1,
/// where Sigma1^{1/2} Sigma2^{-1} Sigma1^{1/2} = U^T Lambda U.
struct AstarMatrix {
    MatrixXd a_star;
    MatrixXd sigma1;
    MatrixXd sigma2;
    VectorXd lambda;
    long rank = 0;
    // rank(Sigma2 - Sigma1) < 3: pi(A* mu) cannot be superharmonic.
    bool below_superharmonic_rank = false;
};

inline constexpr double kUnitEigenvalueTolerance = 1e-9;

// Throws std::invalid_argument unless Sigma1 <= Sigma2 in Loewner order.
AstarMatrix build_astar(const SpdMatrix& sigma1, const SpdMatrix& sigma2);

// Returns (log pi_{S; Sigma2 - Sigma1}(A* mu), log pi_S(mu)). Throws
// RankDeficient when Sigma2 - Sigma1 is singular.
std::pair<double, double> rescaled_stein_identity_check(const SpdMatrix& sigma1,
                                                        const SpdMatrix& sigma2,
                                                        const VectorXd& mu);

struct SuperharmonicityReport {
    std::vector<double> laplacians;
    double max_laplacian;
};

// Central-difference Laplacian of pi (not log pi) at each point.
SuperharmonicityReport superharmonicity_check(const Prior& prior,
                                              const std::vector<VectorXd>& points, double h);

}  // namespace shrinkage

#endif
