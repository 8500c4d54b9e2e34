#pragma once

#include <optional>

#include "infgeo/divergence.hpp"

namespace infgeo {

/// Affine submanifold of the parameter space: offset + span(basis) in
/// either the primal or the dual chart, optionally restricted by a box
/// in that chart so represented points stay inside the domain.
class AffineSubmanifold {
  public:
    AffineSubmanifold(Chart chart, Vector offset, Matrix basis,
                      std::optional<Vector> box_lo = std::nullopt,
                      std::optional<Vector> box_hi = std::nullopt);

    Chart chart() const { return chart_; }
    Index ambient_dim() const { return offset_.size(); }
    Index dim() const { return basis_.cols(); }
    const Vector& offset() const { return offset_; }
    const Matrix& basis() const { return basis_; }

    /// offset + basis * u in the submanifold's own chart.
    Vector chart_point(const Vector& u) const;
    bool within_box(const Vector& chart_point) const;

    /// The represented point in the primal chart (applies from_dual for
    /// dual-chart submanifolds). Throws DomainError when the point leaves
    /// the box or the generator's domain.
    PrimalCoords point(const Generator& gen, const Vector& u) const;

  private:
    Chart chart_;
    Vector offset_;
    Matrix basis_;
    std::optional<Vector> box_lo_, box_hi_;
};

struct Triangle {
    PrimalCoords p, q, r;
};

/// Affine interpolation in the primal chart: (1-t) xi_p + t xi_q.
PrimalCoords primal_segment(const Generator& gen, const PrimalCoords& p,
                            const PrimalCoords& q, double t);

/// Affine interpolation in the dual chart, mapped back through from_dual.
PrimalCoords dual_segment(const Generator& gen, const PrimalCoords& p,
                          const PrimalCoords& q, double t);

/// Finite orthogonality pairing at the corner Q of the triangle:
///   (xi_P - xi_Q) . (xi*_R - xi*_Q),
/// the tangent of the primal geodesic Q -> P paired against the tangent
/// of the dual geodesic Q -> R. Zero means the two legs meet orthogonally
/// in the metric at Q, and the pairing equals pythagoras_residual
/// identically (the additivity identity is exact when it vanishes).
double orthogonality_defect(const Generator& gen, const Triangle& tri);

/// Chart-swapped pairing (xi*_P - xi*_Q) . (xi_R - xi_Q); equals
/// dual_pythagoras_residual identically.
double dual_orthogonality_defect(const Generator& gen, const Triangle& tri);

/// D[P||Q] + D[Q||R] - D[P||R] for the Bregman divergence of gen.
double pythagoras_residual(const Generator& gen, const Triangle& tri);

/// Same residual for the dual divergence D*.
double dual_pythagoras_residual(const Generator& gen, const Triangle& tri);

struct ProjectionOptions {
    double gradient_tolerance = 1e-12;  // scaled stationarity norm
    int max_iterations = 100;
    int max_halvings = 40;
    std::optional<Vector> initial_u;
    double singular_rcond = 1e-10;  // near-singular warning threshold
};

struct ProjectionResult {
    PrimalCoords point;        // projected point, primal chart
    Vector u;                  // submanifold coordinates of the solution
    double divergence;         // objective value at the solution
    int iterations;
    double gradient_norm;      // final scaled stationarity norm
    bool near_singular = false;  // restricted Hessian close to singular
};

/// Geodesic projection: the point of the submanifold minimizing
/// D_psi[P || Q(u)], computed by damped Newton on the stationarity
/// conditions over the submanifold coordinates. Unique for submanifolds
/// flat in the dual chart. Boundary-hitting (box or domain) is reported
/// as ProjectionError with the best iterate.
ProjectionResult geodesic_projection(const Generator& gen, const PrimalCoords& p,
                                     const AffineSubmanifold& sub,
                                     const ProjectionOptions& opts = {});

/// Dual geodesic projection: minimizes D_psi[Q(u) || P]; unique for
/// submanifolds flat in the primal chart.
ProjectionResult dual_geodesic_projection(const Generator& gen, const PrimalCoords& p,
                                          const AffineSubmanifold& sub,
                                          const ProjectionOptions& opts = {});

}  // namespace infgeo
