#ifndef SHRINKAGE_HARNESS_SELFTEST_HPP
#define SHRINKAGE_HARNESS_SELFTEST_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace shrinkage::harness {

struct CheckResult {
    std::string name;
    bool passed = false;
    // Check-specific statistic (a z-score, an error or a count).
    double statistic = 0.0;
    double threshold = 0.0;
    long n = 0;
    std::string detail;
};

// Names of the checks, in execution order.
std::vector<std::string> selftest_suite();

// Cross-module oracle checks; each runs on its own substream of `seed`.
std::vector<CheckResult> run_selftest(std::uint64_t seed, unsigned workers);

}  // namespace shrinkage::harness

#endif
