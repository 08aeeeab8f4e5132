#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace rhc {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent inputs (dimension mismatches, bad grids, ...).
struct InvalidInputError : Error {
    using Error::Error;
};

// A trajectory left the representable range (non-finite state).
struct DivergenceError : Error {
    DivergenceError(const std::string& what, int node_index)
        : Error(what), node(node_index) {}
    int node;  // first grid node at which the state was non-finite
};

// An iterative solver stopped making progress before reaching its target.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& what, double residual)
        : Error(what), last_residual(residual) {}
    double last_residual;
};

// A linear tensor/Lyapunov system is singular because of the operator spectrum.
struct DegenerateSpectrumError : Error {
    using Error::Error;
};

// (A, B) fails the stabilizability test (or (A, C) the detectability test).
struct NotStabilizableError : Error {
    NotStabilizableError(const std::string& what, std::complex<double> mode)
        : Error(what), failing_mode(mode) {}
    std::complex<double> failing_mode;  // eigenvalue at which the rank test fails
};

// The long-horizon reference changed too much when the horizon was extended.
struct ReferenceUnstableError : Error {
    ReferenceUnstableError(const std::string& what, double change, double bound)
        : Error(what), certificate(change), tolerance(bound) {}
    double certificate;  // measured L2 change of the restricted control
    double tolerance;
};

// File system / parsing problems.
struct IoError : Error {
    using Error::Error;
};

}  // namespace rhc
