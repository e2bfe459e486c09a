#pragma once

#include <stdexcept>
#include <string>

namespace corrtest {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (non-square input, mismatched d, ...).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid argument value supplied by the caller.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration (replicate counts, scenario settings).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Data cannot be analysed: constant columns, too few rows, non-finite values.
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// Malformed input file (unreadable, ragged rows, non-numeric fields).
class DataError : public Error {
public:
    using Error::Error;
};

/// The hypothesis carries no variation under the estimated covariance.
class DegenerateHypothesisError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of a transform (Fisher z at |x| >= 1).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Internal consistency failure, e.g. a covariance estimate that is clearly indefinite.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace corrtest
