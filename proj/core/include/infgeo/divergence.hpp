#pragma once

#include "infgeo/generator.hpp"

namespace infgeo {

/// Symmetric positive definite coefficient matrix of a metric at a point.
struct QuadraticForm {
    Matrix matrix;

    /// Validates symmetry (1e-12 relative) and positive definiteness.
    explicit QuadraticForm(Matrix m);

    double apply(const Vector& v) const { return v.dot(matrix * v); }
};

/// A Bregman divergence together with the orientation flag selecting
/// D_psi or its dual D*_psi.
struct DivergencePair {
    const Generator* gen;
    enum class Orientation { primal, dual } orientation = Orientation::primal;

    double operator()(const PrimalCoords& p, const PrimalCoords& q) const;
};

/// Bregman divergence
///   D_psi[P||Q] = psi(xi_P) - psi(xi_Q) - grad psi(xi_Q) . (xi_P - xi_Q),
/// the first-order Taylor remainder of psi at Q. Nonnegative, zero iff
/// xi_P = xi_Q.
double bregman(const Generator& gen, const PrimalCoords& p, const PrimalCoords& q);

/// Dual divergence D*_psi[P||Q] = D_psi[Q||P], which equals the Bregman
/// divergence of the Legendre dual in dual coordinates.
double dual_bregman(const Generator& gen, const PrimalCoords& p, const PrimalCoords& q);

/// Mixed representation psi(xi_P) + psi*(xi*_Q) - xi_P . xi*_Q; agrees
/// with bregman(p, q) when q_dual is the dual image of q.
double mixed_bregman(const Generator& gen, const PrimalCoords& p, const DualCoords& q_dual);

/// Riemannian metric induced by D_psi: the Hessian of psi at the point.
/// Throws ConvexityError when the Hessian is not positive definite.
QuadraticForm induced_metric(const Generator& gen, const PrimalCoords& p);

/// Half line element: (1/2) dxi^T G(xi_P) dxi. The ratio
/// bregman(p, p + dxi) / local_quadratic(p, dxi) tends to 1 as |dxi| -> 0.
double local_quadratic(const Generator& gen, const PrimalCoords& p, const Vector& dxi);

/// Kullback-Leibler divergence of two discrete distributions,
/// sum_i p_i log(p_i / q_i) with 0 log 0 := 0. Support violations
/// (p_i > 0 where q_i = 0) return +infinity rather than throwing;
/// non-normalized or negative inputs throw ValidationError.
double kl_discrete(const Vector& p, const Vector& q, double normalization_tol = 1e-9);

}  // namespace infgeo
