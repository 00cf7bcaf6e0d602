#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace altproj {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimension or shape mismatch between arguments.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Lowest-term extraction on a series that vanishes through its truncation order.
class ZeroSeriesError : public Error {
public:
    using Error::Error;
};

/// Malformed polynomial text or configuration.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Invalid scenario configuration (bad keys, shapes, or failed assertions).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A rate predictor does not apply to the given data.
class InapplicableError : public Error {
public:
    using Error::Error;
};

/// Too little data for an estimator.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Newton or root-finding failure. Carries the last residual and, when raised
/// from inside an iteration driver, the step index.
class SolverFailure : public Error {
public:
    SolverFailure(const std::string& what, double residual, long step = -1)
        : Error(what), residual_(residual), step_(step) {}

    double residual() const noexcept { return residual_; }
    long step() const noexcept { return step_; }

private:
    double residual_;
    long step_;
};

}  // namespace altproj
