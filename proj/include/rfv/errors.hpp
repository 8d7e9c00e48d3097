#pragma once

#include <stdexcept>
#include <string>

namespace rfv {

// Numerical failures map to CLI exit code 1, usage problems to exit code 2.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NoConvergence : NumericalError {
    double last_residual;
    NoConvergence(const std::string& msg, double residual)
        : NumericalError(msg), last_residual(residual) {}
};

struct LeftUpperHalfPlane : NumericalError {
    using NumericalError::NumericalError;
};

struct NonPositiveMuStar : NumericalError {
    using NumericalError::NumericalError;
};

struct NegativeRadicand : NumericalError {
    using NumericalError::NumericalError;
};

struct DegenerateDenominator : NumericalError {
    using NumericalError::NumericalError;
};

struct PhaseViolation : NumericalError {
    using NumericalError::NumericalError;
};

struct FactorizationFailure : NumericalError {
    using NumericalError::NumericalError;
};

struct BinMismatch : NumericalError {
    using NumericalError::NumericalError;
};

struct UnknownActivation : UsageError {
    using UsageError::UsageError;
};

struct ConfigError : UsageError {
    using UsageError::UsageError;
};

}  // namespace rfv
