#ifndef CEOPT_ERRORS_HPP
#define CEOPT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ceopt {

/// Mismatched vector/model dimensions.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Invalid algorithm parameter (elite count, smoothing factor, ...).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Query outside the supported domain (e.g. time outside the horizon).
struct DomainError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// Objective returned a non-finite value.
struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// ODE state became non-finite during integration.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A sampling distribution lost all probability mass.
struct ModelCollapseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed caller-supplied data (e.g. not a permutation).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Instance too large for an exhaustive computation.
struct SizeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Configuration file problem; message carries the key path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ceopt

#endif
