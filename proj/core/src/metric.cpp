#include "infgeo/metric.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>
#include <sstream>

#include "infgeo/errors.hpp"

namespace infgeo {

MetricField::MetricField(Index dim, MatrixFn fundamental, Signature signature,
                         DomainGuard domain, PartialFn partials)
    : dim_(dim),
      fundamental_(std::move(fundamental)),
      signature_(signature),
      domain_(std::move(domain)),
      partials_(std::move(partials)) {
    if (dim_ < 1) throw ValidationError("MetricField: dim must be >= 1");
    if (!fundamental_) throw ValidationError("MetricField: fundamental map is required");
}

MetricField MetricField::from_generator(const Generator& gen) {
    auto base = std::make_shared<const Generator>(gen);
    MetricField field(
        gen.dim(), [base](const Vector& xi) { return base->hessian(xi); },
        Signature::riemannian, [base](const Vector& xi) { return base->in_domain(xi); });
    field.generator_induced_ = true;
    return field;
}

bool MetricField::in_domain(const Vector& xi) const {
    if (xi.size() != dim_) return false;
    return domain_ ? domain_(xi) : true;
}

void MetricField::require_in_domain(const Vector& xi, const char* where) const {
    if (!in_domain(xi)) {
        std::ostringstream os;
        os << where << ": point is outside the metric's domain";
        throw DomainError(os.str());
    }
}

Matrix MetricField::fundamental(const Vector& xi) const {
    require_in_domain(xi, "MetricField::fundamental");
    Matrix g = fundamental_(xi);
    if (g.rows() != dim_ || g.cols() != dim_)
        throw ValidationError("MetricField: fundamental map returned wrong shape");
    g = 0.5 * (g + g.transpose()).eval();
    if (signature_ == Signature::riemannian) {
        Eigen::LLT<Matrix> llt(g);
        if (llt.info() != Eigen::Success)
            throw ConvexityError(
                "MetricField: fundamental matrix is not positive definite under a "
                "Riemannian signature");
    }
    return g;
}

Matrix MetricField::fundamental_partial(const Vector& xi, Index l) const {
    if (partials_) {
        Matrix d = partials_(xi, l);
        return 0.5 * (d + d.transpose()).eval();
    }
    return fd::matrix_partial([this](const Vector& x) { return fundamental(x); }, xi, l);
}

Matrix MetricField::inverse_fundamental(const Vector& xi) const {
    const Matrix g = fundamental(xi);
    Eigen::FullPivLU<Matrix> lu(g);
    if (!lu.isInvertible())
        throw DegenerateMetricError(
            "MetricField: fundamental matrix is singular at the queried point");
    Matrix inv = lu.inverse();
    return 0.5 * (inv + inv.transpose()).eval();
}

double MetricField::inner(const Vector& xi, const Vector& v, const Vector& w) const {
    return v.dot(fundamental(xi) * w);
}

TangentClass classify_tangent(const MetricField& metric, const TangentVector& v, double tol) {
    metric.require_in_domain(v.base.xi, "classify_tangent");
    const double norm2 = metric.inner(v.base.xi, v.components, v.components);
    if (std::abs(norm2) <= tol) return TangentClass::lightlike;
    return norm2 > 0.0 ? TangentClass::spacelike : TangentClass::timelike;
}

ChristoffelSymbols christoffel(const MetricField& metric, const PrimalCoords& p) {
    metric.require_in_domain(p.xi, "christoffel");
    const Index n = metric.dim();
    const Matrix g_inv = metric.inverse_fundamental(p.xi);

    std::vector<Matrix> dg(n);
    for (Index l = 0; l < n; ++l) dg[l] = metric.fundamental_partial(p.xi, l);

    ChristoffelSymbols gamma(n, Matrix::Zero(n, n));
    // Fill i <= j and mirror: the symmetry Gamma^k_ij = Gamma^k_ji is then
    // exact by construction.
    for (Index i = 0; i < n; ++i) {
        for (Index j = i; j < n; ++j) {
            for (Index k = 0; k < n; ++k) {
                double sum = 0.0;
                for (Index l = 0; l < n; ++l) {
                    sum += g_inv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                }
                gamma[k](i, j) = 0.5 * sum;
                gamma[k](j, i) = gamma[k](i, j);
            }
        }
    }
    return gamma;
}

}  // namespace infgeo
