// errors.hpp: Exception taxonomy shared by every module
//
// ValidationError and its children are user-input problems (bad point, bad
// config). NumericalError and its children are pathologies of a computation
// that was given valid input. The CLI maps the two families to distinct exit
// statuses.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rabi {

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Atomic quadratures outside the Bloch disk q1^2 + p1^2 <= 2.
struct DomainError : ValidationError {
    using ValidationError::ValidationError;
};

// Requested energy shell is unreachable from the given (q1, p1, q2).
struct NoSolutionError : ValidationError {
    using ValidationError::ValidationError;
};

struct ConfigError : ValidationError {
    ConfigError(const std::string& what, std::size_t line = 0)
        : ValidationError(line ? "line " + std::to_string(line) + ": " + what : what), line(line) {}
    std::size_t line;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Trajectory ran into the Bloch-sphere pole where the canonical chart is singular.
struct SingularityError : NumericalError {
    using NumericalError::NumericalError;
};

struct StepSizeError : NumericalError {
    using NumericalError::NumericalError;
};

struct EigenSolverError : NumericalError {
    using NumericalError::NumericalError;
};

// Coherent state does not fit inside the photon cutoff.
struct TruncationError : NumericalError {
    TruncationError(const std::string& what, double tail_mass)
        : NumericalError(what), tail_mass(tail_mass) {}
    double tail_mass;
};

} // namespace rabi
