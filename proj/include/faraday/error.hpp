#pragma once

#include <stdexcept>
#include <string>

namespace faraday {

/// Rejected input: a parameter, configuration or state that violates a
/// documented precondition.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (non-convergence, non-finite result).
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reading or writing a file failed.
class IoFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace faraday
