#ifndef SAFEACI_ERRORS_HPP
#define SAFEACI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace safeaci {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mismatched vector/matrix dimensions in an operation.
struct DimensionError : Error {
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

// A state was evaluated outside (or within the numeric guard band of) the
// safe set. Episodes treat this as a constraint violation, never as a
// value to clamp.
struct OutsideSafeSetError : Error {
    explicit OutsideSafeSetError(const std::string& msg) : Error(msg) {}
};

// Numeric failures abort a run with exit code 4 at the CLI.
struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

struct SingularMassMatrixError : NumericError {
    explicit SingularMassMatrixError(const std::string& msg) : NumericError(msg) {}
};

struct NonFiniteError : NumericError {
    explicit NonFiniteError(const std::string& msg) : NumericError(msg) {}
};

// Integrated parameter estimate escaped its projection ball.
struct ProjectionEscapeError : NumericError {
    explicit ProjectionEscapeError(const std::string& msg) : NumericError(msg) {}
};

// Covariance matrix lost positive definiteness; we fail loudly instead of
// regularizing so non-exciting runs are visible.
struct CovarianceError : NumericError {
    explicit CovarianceError(const std::string& msg) : NumericError(msg) {}
};

// Sampled control-effectiveness kernel dropped below the full-rank floor.
struct DegenerateKernelError : NumericError {
    explicit DegenerateKernelError(const std::string& msg) : NumericError(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace safeaci

#endif
