#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "infgeo/types.hpp"

namespace infgeo {

/// Scalar-valued map on parameter vectors.
using ScalarFn = std::function<double(const Vector&)>;
/// Vector-valued map on parameter vectors.
using VectorFn = std::function<Vector(const Vector&)>;
/// Matrix-valued map on parameter vectors.
using MatrixFn = std::function<Matrix(const Vector&)>;
/// Predicate marking the open domain of a chart.
using DomainGuard = std::function<bool(const Vector&)>;

namespace fd {

// Component-relative central difference steps. The gradient step trades
// truncation against rounding at ~1e-11 accuracy for smooth maps; the
// Hessian step accounts for the extra cancellation in second differences.
inline double gradient_step(double x) { return 1e-6 * (1.0 + std::abs(x)); }
inline double hessian_step(double x) { return 1e-4 * (1.0 + std::abs(x)); }

/// Central-difference gradient of a scalar map.
Vector gradient(const ScalarFn& f, const Vector& x);

/// Central-difference Hessian of a scalar map, symmetrized exactly.
Matrix hessian(const ScalarFn& f, const Vector& x);

/// Central-difference Jacobian of a vector map, column j = df/dx_j.
Matrix jacobian(const VectorFn& f, const Vector& x, double step_scale = 1e-6);

/// Central-difference partial of a matrix map along coordinate l.
Matrix matrix_partial(const MatrixFn& g, const Vector& x, Index l, double step_scale = 1e-4);

}  // namespace fd

/// Composite quadrature of uniformly sampled values: Simpson on even
/// interval counts, Simpson + 3/8 correction when the count is odd.
double simpson(const std::vector<double>& values, double step);

/// Deterministic uniform sampler with a portable value mapping; the
/// mt19937_64 stream is pinned by the standard, so seeded draws are
/// reproducible across platforms.
class UniformRng {
  public:
    explicit UniformRng(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) {
        const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    Vector uniform_vector(Index dim, double lo, double hi) {
        Vector v(dim);
        for (Index i = 0; i < dim; ++i) v[i] = uniform(lo, hi);
        return v;
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace infgeo
