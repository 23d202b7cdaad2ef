#pragma once

#include <stdexcept>
#include <string>

namespace adact {

// Tensor/layer shape disagreements. Messages always name both shapes.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid parameter domain (e.g. non-positive alpha for an adaptive kind).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation not defined for the given activation kind.
struct UnsupportedOperationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// NaN loss, probabilities outside the clamping window, and similar.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File format problems: bad magic, truncation, count mismatch.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration values.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace adact
