#ifndef SHRINKAGE_ERRORS_HPP
#define SHRINKAGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace shrinkage {

// Base for every numerical failure raised by the library. Configuration
// problems use ConfigError (harness) or std::invalid_argument.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NotPositiveDefinite : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class RankDeficient : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InfiniteDivergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// log-density evaluated at the pole of a Stein-type prior.
class PoleError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonFiniteError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SamplerError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

inline void require_same_dim(long a, long b, const char* what) {
    if (a != b) {
        throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(a) +
                                " does not match " + std::to_string(b));
    }
}

}  // namespace shrinkage

#endif
