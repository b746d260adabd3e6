#pragma once

#include <stdexcept>
#include <string>

namespace mintrace {

/// Base class for every error raised by the library. `exit_code()` is the
/// process status the CLI reports for it.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual int exit_code() const noexcept { return 1; }
};

/// Invalid argument or configuration value.
class ParameterError : public Error {
public:
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 2; }
};

/// Malformed or unknown configuration key / input file.
class ConfigError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// A model whose weight support is not acyclic or whose variances are not positive.
class ModelError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// Exhaustive enumeration requested beyond the supported size.
class SizeError : public Error {
public:
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 3; }
};

/// Covariance not numerically positive definite (pivot below floor).
class DegeneracyError : public Error {
public:
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 4; }
};

/// Rank-deficient regression design.
class ConditioningError : public DegeneracyError {
public:
    using DegeneracyError::DegeneracyError;
};

}  // namespace mintrace
