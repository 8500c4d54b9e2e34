#pragma once

#include <vector>

#include "infgeo/generator.hpp"

namespace infgeo {

enum class Signature { riemannian, pseudo };

/// A field of fundamental matrices xi -> G(xi), either induced by a
/// generator (G = Hessian of psi) or user supplied. The matrix returned
/// by fundamental() is exactly symmetric; Riemannian fields must be
/// positive definite wherever queried, pseudo fields merely non-degenerate.
class MetricField {
  public:
    /// Partial derivative callback: (xi, l) -> dG/dxi_l. Optional; central
    /// finite differences are used when absent.
    using PartialFn = std::function<Matrix(const Vector&, Index)>;

    MetricField(Index dim, MatrixFn fundamental, Signature signature,
                DomainGuard domain = {}, PartialFn partials = {});

    /// Metric induced by a generator's Hessian; Riemannian by strict convexity.
    static MetricField from_generator(const Generator& gen);

    Index dim() const { return dim_; }
    Signature signature() const { return signature_; }
    /// True when the field was built from a generator's Hessian.
    bool generator_induced() const { return generator_induced_; }
    bool in_domain(const Vector& xi) const;

    Matrix fundamental(const Vector& xi) const;
    /// dG/dxi_l, analytic when supplied, else central differences with
    /// step 1e-4 * (1 + |xi_l|).
    Matrix fundamental_partial(const Vector& xi, Index l) const;
    /// G(xi)^-1; throws DegenerateMetricError when G is singular.
    Matrix inverse_fundamental(const Vector& xi) const;

    /// g(v, w) at the point xi.
    double inner(const Vector& xi, const Vector& v, const Vector& w) const;

    void require_in_domain(const Vector& xi, const char* where) const;

  private:
    Index dim_;
    MatrixFn fundamental_;
    Signature signature_;
    DomainGuard domain_;
    PartialFn partials_;
    bool generator_induced_ = false;
};

/// Tangent vector attached to a base point.
struct TangentVector {
    PrimalCoords base;
    Vector components;
};

enum class TangentClass { spacelike, lightlike, timelike };

/// Sign of g(v, v): spacelike > 0, lightlike = 0 (within tol), timelike < 0.
TangentClass classify_tangent(const MetricField& metric, const TangentVector& v,
                              double tol = 1e-12);

/// Christoffel symbols of the Levi-Civita connection,
///   Gamma^k_ij = 1/2 sum_l g^kl (d_i g_jl + d_j g_il - d_l g_ij),
/// returned as one matrix per upper index k. The symmetry
/// Gamma^k_ij = Gamma^k_ji holds exactly: entries are computed once for
/// i <= j and mirrored.
using ChristoffelSymbols = std::vector<Matrix>;

ChristoffelSymbols christoffel(const MetricField& metric, const PrimalCoords& p);

}  // namespace infgeo
