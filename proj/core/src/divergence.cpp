#include "infgeo/divergence.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "infgeo/errors.hpp"

namespace infgeo {

QuadraticForm::QuadraticForm(Matrix m) : matrix(std::move(m)) {
    if (matrix.rows() != matrix.cols())
        throw ValidationError("QuadraticForm: matrix must be square");
    const double scale = 1.0 + matrix.cwiseAbs().maxCoeff();
    const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
        throw ConvexityError("QuadraticForm: matrix is not symmetric");
    Eigen::LLT<Matrix> llt(matrix);
    if (llt.info() != Eigen::Success)
        throw ConvexityError("QuadraticForm: matrix is not positive definite");
}

double DivergencePair::operator()(const PrimalCoords& p, const PrimalCoords& q) const {
    return orientation == Orientation::primal ? bregman(*gen, p, q) : dual_bregman(*gen, p, q);
}

double bregman(const Generator& gen, const PrimalCoords& p, const PrimalCoords& q) {
    gen.require_in_domain(p.xi, "bregman");
    gen.require_in_domain(q.xi, "bregman");
    return gen.value(p.xi) - gen.value(q.xi) - gen.gradient(q.xi).dot(p.xi - q.xi);
}

double dual_bregman(const Generator& gen, const PrimalCoords& p, const PrimalCoords& q) {
    return bregman(gen, q, p);
}

double mixed_bregman(const Generator& gen, const PrimalCoords& p, const DualCoords& q_dual) {
    gen.require_in_domain(p.xi, "mixed_bregman");
    return gen.value(p.xi) + dual_value(gen, q_dual) - p.xi.dot(q_dual.xi_star);
}

QuadraticForm induced_metric(const Generator& gen, const PrimalCoords& p) {
    gen.require_in_domain(p.xi, "induced_metric");
    try {
        return QuadraticForm(gen.hessian(p.xi));
    } catch (const ConvexityError&) {
        throw ConvexityError("induced_metric: Hessian is not positive definite, the "
                             "generator is not strictly convex at this point");
    }
}

double local_quadratic(const Generator& gen, const PrimalCoords& p, const Vector& dxi) {
    gen.require_in_domain(p.xi, "local_quadratic");
    gen.require_in_domain(p.xi + dxi, "local_quadratic (displaced point)");
    return 0.5 * dxi.dot(gen.hessian(p.xi) * dxi);
}

double kl_discrete(const Vector& p, const Vector& q, double normalization_tol) {
    if (p.size() != q.size())
        throw ValidationError("kl_discrete: distributions have different sizes");
    if (p.size() == 0) throw ValidationError("kl_discrete: empty distributions");
    if ((p.array() < 0.0).any() || (q.array() < 0.0).any())
        throw ValidationError("kl_discrete: negative probability entry");
    if (std::abs(p.sum() - 1.0) > normalization_tol)
        throw ValidationError("kl_discrete: first argument does not sum to 1");
    if (std::abs(q.sum() - 1.0) > normalization_tol)
        throw ValidationError("kl_discrete: second argument does not sum to 1");

    double sum = 0.0;
    for (Index i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;  // 0 log 0 := 0
        if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
        sum += p[i] * std::log(p[i] / q[i]);
    }
    return sum;
}

}  // namespace infgeo
