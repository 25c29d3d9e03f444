#include "shrinkage/rng.hpp"

#include <stdexcept>
#include <vector>

namespace shrinkage {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

VectorXd Rng::normal_vector(long n) {
    VectorXd v(n);
    for (long i = 0; i < n; ++i) v(i) = normal();
    return v;
}

MatrixXd Rng::normal_matrix(long rows, long cols) {
    MatrixXd m(rows, cols);
    // Column-major fill order is part of the reproducibility contract.
    for (long j = 0; j < cols; ++j)
        for (long i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
}

std::uint64_t derive_seed(std::uint64_t master, std::span<const std::uint64_t> path) {
    if (path.size() > kMaxSubstreamDepth) {
        throw std::invalid_argument("seed_substream: path longer than 8 indices");
    }
    std::uint64_t h = splitmix64(master);
    std::uint64_t level = 1;
    for (std::uint64_t index : path) {
        // Level salt keeps [a, b] and [b, a] apart.
        h = splitmix64(h ^ splitmix64(index + 0x632be59bd9b4e019ULL * level));
        ++level;
    }
    return splitmix64(h ^ path.size());
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    return derive_seed(master, std::span<const std::uint64_t>(path.begin(), path.size()));
}

Rng seed_substream(std::uint64_t master, std::span<const std::uint64_t> path) {
    return Rng(derive_seed(master, path));
}

Rng seed_substream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(master, path));
}

}  // namespace shrinkage
