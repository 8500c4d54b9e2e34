#pragma once

#include <stdexcept>
#include <string>

#include "infgeo/types.hpp"

namespace infgeo {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A point violated a domain guard.
struct DomainError : Error {
    using Error::Error;
};

/// A Hessian that must be symmetric positive definite is not.
struct ConvexityError : Error {
    using Error::Error;
};

/// Newton inversion of a gradient map did not converge.
struct InversionError : Error {
    InversionError(const std::string& what, double residual, Vector iterate)
        : Error(what), last_residual(residual), last_iterate(std::move(iterate)) {}

    double last_residual;
    Vector last_iterate;
};

/// The fundamental matrix is singular at the queried point.
struct DegenerateMetricError : Error {
    using Error::Error;
};

/// Numerical integration produced a non-finite state.
struct IntegrationError : Error {
    IntegrationError(const std::string& what, double t)
        : Error(what), last_valid_time(t) {}

    double last_valid_time;
};

/// An operation defined only for Riemannian metrics was applied to a
/// pseudo-Riemannian one, or a pseudo norm turned negative.
struct SignatureError : Error {
    using Error::Error;
};

/// A boundary value solve could not connect the two endpoints.
struct UnreachableError : Error {
    using Error::Error;
};

/// Projection onto a submanifold failed; carries the best iterate found.
struct ProjectionError : Error {
    ProjectionError(const std::string& what, Vector best)
        : Error(what), best_iterate(std::move(best)) {}

    Vector best_iterate;
};

/// Invalid user-facing input (job specs, probability vectors, shapes).
struct ValidationError : Error {
    using Error::Error;
};

}  // namespace infgeo
