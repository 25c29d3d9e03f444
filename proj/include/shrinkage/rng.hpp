#ifndef SHRINKAGE_RNG_HPP
#define SHRINKAGE_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "shrinkage/linalg.hpp"

namespace shrinkage {

/// Explicit random-number handle. Every sampler in the library takes one of
/// these by reference; there is no global generator.
///
/// The engine is std::mt19937_64 and the variates come from Boost.Random,
/// whose algorithms (unlike std:: distributions) are fixed across standard
/// libraries, so streams reproduce across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return uniform_(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() { return normal_(engine_); }
    VectorXd normal_vector(long n);
    MatrixXd normal_matrix(long rows, long cols);
    std::uint64_t next_u64() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    boost::random::uniform_01<double> uniform_;
    boost::random::normal_distribution<double> normal_;
};

inline constexpr std::size_t kMaxSubstreamDepth = 8;

// Hash-based derivation (SplitMix64 finalizer chained over the path).
// Throws std::invalid_argument when the path is longer than 8.
std::uint64_t derive_seed(std::uint64_t master, std::span<const std::uint64_t> path);
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

Rng seed_substream(std::uint64_t master, std::span<const std::uint64_t> path);
Rng seed_substream(std::uint64_t master, std::initializer_list<std::uint64_t> path);

}  // namespace shrinkage

#endif
