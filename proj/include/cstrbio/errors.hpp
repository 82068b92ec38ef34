#ifndef CSTRBIO_ERRORS_HPP
#define CSTRBIO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cstrbio {

/// Nonlinear or linear solve did not reach the requested tolerance.
/// Carries the last defect so callers can report how far off it ended.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double last_defect)
        : std::runtime_error(what), defect(last_defect) {}
    double defect;
};

/// A structural precondition (kinetics family, (NT), affine g) is violated.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A sign or bracket assertion that the model guarantees failed numerically.
class ModelViolationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Root scan completed without a sign change: no equilibrium located.
class NoEquilibriumError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested operating point is outside the feasible range (bracket failure).
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario file problem, with source position for diagnostics.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line_, int column_)
        : std::runtime_error(what), line(line_), column(column_) {}
    int line;
    int column;
};

} // namespace cstrbio

#endif
