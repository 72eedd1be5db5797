#pragma once

#include <stdexcept>
#include <string>

namespace speechcare {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Tensor/layer dimension mismatches.
struct ShapeError : Error {
    using Error::Error;
};

// Argument outside its valid domain (negative duration, bad threshold, ...).
struct DomainError : Error {
    using Error::Error;
};

// Operation called in the wrong order (backward without forward, ...).
struct StateError : Error {
    using Error::Error;
};

// Corrupt or unrecognized file contents (bad magic, truncation).
struct FormatError : Error {
    using Error::Error;
};

// Invalid manifest/config/input data. CLI exit code 2.
struct DataError : Error {
    using Error::Error;
};

// Metric undefined on the given inputs (single-class AUC, empty reference).
struct MetricError : DataError {
    using DataError::DataError;
};

// Numerical failure such as training divergence. CLI exit code 3.
struct NumericError : Error {
    using Error::Error;
};

}  // namespace speechcare
