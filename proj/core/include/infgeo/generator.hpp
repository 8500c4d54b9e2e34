#pragma once

#include <memory>
#include <optional>
#include <string>

#include "infgeo/numeric.hpp"
#include "infgeo/types.hpp"

namespace infgeo {

/// A strictly convex generator psi on an open convex parameter domain,
/// with value, gradient and Hessian access.
///
/// The gradient map xi -> grad psi(xi) defines the dual chart; the
/// Hessian is the fundamental matrix of the induced metric. Analytic
/// gradient/Hessian callbacks are used when supplied, otherwise central
/// finite differences of the value. Immutable after construction and
/// safe to share across threads.
class Generator {
  public:
    struct Options {
        VectorFn gradient;        // analytic gradient, optional
        MatrixFn hessian;         // analytic Hessian, optional
        DomainGuard domain;       // open convex domain, default: all of R^dim
        DomainGuard dual_domain;  // gradient image, optional (else probed by inversion)
        std::optional<Vector> reference_point;  // Newton start, default zeros
        std::string name;
    };

    Generator(Index dim, ScalarFn value, Options opts = {});

    Index dim() const { return dim_; }
    const std::string& name() const { return name_; }

    bool in_domain(const Vector& xi) const;
    /// Membership test for the dual chart. Falls back to attempting the
    /// Newton inversion when no analytic guard was supplied.
    bool in_dual_domain(const Vector& xi_star) const;

    /// psi(xi). Throws DomainError outside the domain guard.
    double value(const Vector& xi) const;
    /// grad psi(xi); analytic if available, else central differences.
    Vector gradient(const Vector& xi) const;
    /// Hessian of psi, exactly symmetrized.
    Matrix hessian(const Vector& xi) const;
    /// Hessian as produced by the underlying route, without the
    /// symmetrization fold; used by the contract diagnostics.
    Matrix raw_hessian(const Vector& xi) const;

    const Vector& reference_point() const { return reference_; }
    bool has_analytic_gradient() const { return static_cast<bool>(analytic_gradient_); }

    void require_in_domain(const Vector& xi, const char* where) const;

  private:
    Index dim_;
    ScalarFn value_;
    VectorFn analytic_gradient_;
    MatrixFn analytic_hessian_;
    DomainGuard domain_;
    DomainGuard dual_domain_;
    Vector reference_;
    std::string name_;
};

struct NewtonOptions {
    int max_iterations = 100;
    int max_halvings = 50;
    double tolerance = 1e-10;  // residual norm scale, see from_dual
    std::optional<Vector> hint;
};

/// Dual parametrisation: xi* = grad psi(xi).
DualCoords to_dual(const Generator& gen, const PrimalCoords& p);

/// Legendre inverse: the unique xi with grad psi(xi) = xi*, found by a
/// damped Newton iteration on grad psi(xi) - xi* = 0. The iteration
/// starts at the hint if given, else at the generator's reference point,
/// and accepts when the residual norm is <= tol * (1 + |xi*|).
PrimalCoords from_dual(const Generator& gen, const DualCoords& d,
                       const NewtonOptions& opts = {});

/// Legendre dual value psi*(xi*) = xi . xi* - psi(xi) at xi = from_dual(xi*).
double dual_value(const Generator& gen, const DualCoords& d,
                  const NewtonOptions& opts = {});

/// The Legendre dual as a Generator over the dual chart, with analytic
/// gradient (the inverse map) and analytic Hessian (the inverse Hessian).
Generator legendre_dual(const Generator& gen);

/// Residuals of the Generator contract at one point: Hessian symmetry
/// (relative), Hessian positive definiteness (negated smallest eigenvalue,
/// so <= 0 passes), and gradient agreement with central differences
/// (relative). Used by the check suites and tests.
struct GeneratorDiagnostics {
    double hessian_asymmetry;
    double negated_min_eigenvalue;
    double gradient_fd_mismatch;
};

GeneratorDiagnostics diagnose_generator(const Generator& gen, const Vector& xi);

}  // namespace infgeo
