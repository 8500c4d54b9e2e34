#include "infgeo/dually_flat.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "infgeo/errors.hpp"

namespace infgeo {

AffineSubmanifold::AffineSubmanifold(Chart chart, Vector offset, Matrix basis,
                                     std::optional<Vector> box_lo,
                                     std::optional<Vector> box_hi)
    : chart_(chart),
      offset_(std::move(offset)),
      basis_(std::move(basis)),
      box_lo_(std::move(box_lo)),
      box_hi_(std::move(box_hi)) {
    const Index n = offset_.size();
    if (n < 1) throw ValidationError("AffineSubmanifold: empty offset");
    if (basis_.size() == 0) basis_.resize(n, 0);
    if (basis_.rows() != n)
        throw ValidationError("AffineSubmanifold: basis rows must match the offset dimension");
    if (basis_.cols() > n)
        throw ValidationError("AffineSubmanifold: more basis columns than ambient dimensions");
    if (basis_.cols() > 0) {
        Eigen::ColPivHouseholderQR<Matrix> qr(basis_);
        if (qr.rank() != basis_.cols())
            throw ValidationError("AffineSubmanifold: basis columns are linearly dependent");
    }
    if (box_lo_ && box_lo_->size() != n)
        throw ValidationError("AffineSubmanifold: box lower bound has wrong dimension");
    if (box_hi_ && box_hi_->size() != n)
        throw ValidationError("AffineSubmanifold: box upper bound has wrong dimension");
}

Vector AffineSubmanifold::chart_point(const Vector& u) const {
    if (u.size() != basis_.cols())
        throw ValidationError("AffineSubmanifold: coordinate vector has wrong dimension");
    if (basis_.cols() == 0) return offset_;
    return offset_ + basis_ * u;
}

bool AffineSubmanifold::within_box(const Vector& pt) const {
    if (box_lo_ && (pt.array() < box_lo_->array()).any()) return false;
    if (box_hi_ && (pt.array() > box_hi_->array()).any()) return false;
    return true;
}

PrimalCoords AffineSubmanifold::point(const Generator& gen, const Vector& u) const {
    const Vector cp = chart_point(u);
    if (!within_box(cp))
        throw DomainError("AffineSubmanifold: represented point violates the box constraints");
    if (chart_ == Chart::primal) {
        gen.require_in_domain(cp, "AffineSubmanifold::point");
        return PrimalCoords(cp);
    }
    return from_dual(gen, DualCoords(cp));
}

PrimalCoords primal_segment(const Generator& gen, const PrimalCoords& p,
                            const PrimalCoords& q, double t) {
    gen.require_in_domain(p.xi, "primal_segment");
    gen.require_in_domain(q.xi, "primal_segment");
    Vector x = (1.0 - t) * p.xi + t * q.xi;
    if (!gen.in_domain(x)) {
        std::ostringstream os;
        os << "primal_segment: segment leaves the domain at t = " << t;
        throw DomainError(os.str());
    }
    return PrimalCoords(std::move(x));
}

PrimalCoords dual_segment(const Generator& gen, const PrimalCoords& p,
                          const PrimalCoords& q, double t) {
    const Vector sp = to_dual(gen, p).xi_star;
    const Vector sq = to_dual(gen, q).xi_star;
    NewtonOptions opts;
    opts.hint = (t < 0.5 ? p.xi : q.xi);
    return from_dual(gen, DualCoords((1.0 - t) * sp + t * sq), opts);
}

double orthogonality_defect(const Generator& gen, const Triangle& tri) {
    const Vector dual_q = to_dual(gen, tri.q).xi_star;
    const Vector dual_r = to_dual(gen, tri.r).xi_star;
    return (tri.p.xi - tri.q.xi).dot(dual_r - dual_q);
}

double dual_orthogonality_defect(const Generator& gen, const Triangle& tri) {
    const Vector dual_p = to_dual(gen, tri.p).xi_star;
    const Vector dual_q = to_dual(gen, tri.q).xi_star;
    return (dual_p - dual_q).dot(tri.r.xi - tri.q.xi);
}

double pythagoras_residual(const Generator& gen, const Triangle& tri) {
    return bregman(gen, tri.p, tri.q) + bregman(gen, tri.q, tri.r) -
           bregman(gen, tri.p, tri.r);
}

double dual_pythagoras_residual(const Generator& gen, const Triangle& tri) {
    return dual_bregman(gen, tri.p, tri.q) + dual_bregman(gen, tri.q, tri.r) -
           dual_bregman(gen, tri.p, tri.r);
}

namespace {

struct Objective {
    const Generator& gen;
    const PrimalCoords& p;
    const AffineSubmanifold& sub;
    bool dual_variant;  // false: min D[P||Q(u)], true: min D[Q(u)||P]

    // Primal point of the submanifold at u; the hint warm-starts the
    // Legendre inversion for dual-chart submanifolds.
    PrimalCoords point(const Vector& u, const Vector* hint) const {
        const Vector cp = sub.chart_point(u);
        if (!sub.within_box(cp))
            throw DomainError("projection: iterate violates the box constraints");
        if (sub.chart() == Chart::primal) {
            gen.require_in_domain(cp, "projection");
            return PrimalCoords(cp);
        }
        NewtonOptions nopts;
        if (hint) nopts.hint = *hint;
        return from_dual(gen, DualCoords(cp), nopts);
    }

    double value(const PrimalCoords& x) const {
        return dual_variant ? bregman(gen, x, p) : bregman(gen, p, x);
    }

    // Stationarity conditions of the restricted objective; all four
    // chart/variant combinations have closed forms in the generator's
    // gradient and Hessian.
    Vector gradient(const PrimalCoords& x) const {
        const Matrix& b = sub.basis();
        if (!dual_variant) {
            if (sub.chart() == Chart::dual) return b.transpose() * (x.xi - p.xi);
            return -b.transpose() * (gen.hessian(x.xi) * (p.xi - x.xi));
        }
        const Vector grad_diff = gen.gradient(x.xi) - gen.gradient(p.xi);
        if (sub.chart() == Chart::primal) return b.transpose() * grad_diff;
        return b.transpose() * gen.hessian(x.xi).llt().solve(grad_diff);
    }

    // Newton matrix. Exact for the two flat cases of the projection
    // theorem, finite differences of the gradient otherwise.
    Matrix newton_matrix(const Vector& u, const PrimalCoords& x) const {
        const Matrix& b = sub.basis();
        if (!dual_variant && sub.chart() == Chart::dual) {
            return b.transpose() * gen.hessian(x.xi).llt().solve(b);
        }
        if (dual_variant && sub.chart() == Chart::primal) {
            return b.transpose() * gen.hessian(x.xi) * b;
        }
        auto grad_at = [this, &x](const Vector& uu) {
            return gradient(point(uu, &x.xi));
        };
        return fd::jacobian(grad_at, u, 1e-6);
    }
};

ProjectionResult project_impl(const Generator& gen, const PrimalCoords& p,
                              const AffineSubmanifold& sub, const ProjectionOptions& opts,
                              bool dual_variant) {
    const char* op = dual_variant ? "dual_geodesic_projection" : "geodesic_projection";
    gen.require_in_domain(p.xi, op);
    if (sub.ambient_dim() != gen.dim())
        throw ValidationError(std::string(op) + ": submanifold dimension mismatch");

    Objective obj{gen, p, sub, dual_variant};
    const Index m = sub.dim();

    // Initial coordinates: least squares fit of the chart image of P,
    // falling back to the submanifold origin.
    Vector u;
    if (opts.initial_u) {
        u = *opts.initial_u;
        if (u.size() != m) throw ValidationError(std::string(op) + ": initial_u has wrong size");
    } else if (m == 0) {
        u = Vector(0);
    } else {
        const Vector target =
            sub.chart() == Chart::primal ? p.xi : to_dual(gen, p).xi_star;
        u = sub.basis().colPivHouseholderQr().solve(target - sub.offset());
    }

    auto try_point = [&](const Vector& uu, const Vector* hint) -> std::optional<PrimalCoords> {
        try {
            return obj.point(uu, hint);
        } catch (const Error&) {
            return std::nullopt;
        }
    };

    std::optional<PrimalCoords> x = try_point(u, nullptr);
    if (!x && m > 0) {
        u = Vector::Zero(m);
        x = try_point(u, nullptr);
    }
    if (!x)
        throw ProjectionError(std::string(op) + ": no feasible starting point on the "
                                                "submanifold",
                              sub.chart_point(m > 0 ? Vector::Zero(m) : Vector(0)));

    // Gradient scale for the stopping test, from the magnitudes of the
    // paired factors so the tolerance is scale invariant.
    auto scale_of = [&](const PrimalCoords& xx) {
        double col = 0.0;
        for (Index j = 0; j < m; ++j) col = std::max(col, sub.basis().col(j).norm());
        const double displacement =
            sub.chart() == Chart::dual || dual_variant
                ? (gen.gradient(xx.xi) - gen.gradient(p.xi)).norm() + (xx.xi - p.xi).norm()
                : (xx.xi - p.xi).norm();
        return col * displacement + 1.0;
    };

    double fval = obj.value(*x);
    Vector grad = obj.gradient(*x);
    ProjectionResult result;
    result.near_singular = false;
    int iter = 0;

    for (; iter < opts.max_iterations; ++iter) {
        if (m == 0 || grad.norm() <= opts.gradient_tolerance * scale_of(*x)) break;

        Matrix nm = obj.newton_matrix(u, *x);
        Eigen::JacobiSVD<Matrix> svd(nm, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double smax = svd.singularValues().maxCoeff();
        Vector du = smax > 0.0 ? Vector(svd.solve(-grad)) : Vector(-grad);

        double alpha = 1.0;
        bool accepted = false;
        for (int half = 0; half < opts.max_halvings; ++half) {
            const Vector u_try = u + alpha * du;
            auto x_try = try_point(u_try, &x->xi);
            if (x_try) {
                const double f_try = obj.value(*x_try);
                if (std::isfinite(f_try) && f_try <= fval) {
                    const Vector g_try = obj.gradient(*x_try);
                    // Accept on objective decrease, or on gradient decrease
                    // near the floor where f stagnates.
                    if (f_try < fval || g_try.norm() < grad.norm()) {
                        u = u_try;
                        x = x_try;
                        fval = f_try;
                        grad = g_try;
                        accepted = true;
                        break;
                    }
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (grad.norm() <= 1e-8 * scale_of(*x)) break;  // stalled at roundoff floor
            throw ProjectionError(
                std::string(op) +
                    ": Newton stalled (iterate pinned at a box/domain boundary or "
                    "no descent direction)",
                x->xi);
        }
    }

    if (m > 0 && grad.norm() > 1e-6 * scale_of(*x)) {
        throw ProjectionError(std::string(op) + ": stationarity conditions not met "
                                                "within the iteration budget",
                              x->xi);
    }

    // Non-uniqueness warning: restricted objective Hessian at the solution.
    if (m > 0) {
        const Matrix nm = obj.newton_matrix(u, *x);
        Eigen::JacobiSVD<Matrix> svd(nm);
        const double smax = svd.singularValues().maxCoeff();
        const double smin = svd.singularValues().minCoeff();
        result.near_singular = smax <= 0.0 || smin / smax < opts.singular_rcond;
    }

    result.point = *x;
    result.u = u;
    result.divergence = fval;
    result.iterations = iter;
    result.gradient_norm = grad.norm() / scale_of(*x);
    return result;
}

}  // namespace

ProjectionResult geodesic_projection(const Generator& gen, const PrimalCoords& p,
                                     const AffineSubmanifold& sub,
                                     const ProjectionOptions& opts) {
    return project_impl(gen, p, sub, opts, false);
}

ProjectionResult dual_geodesic_projection(const Generator& gen, const PrimalCoords& p,
                                          const AffineSubmanifold& sub,
                                          const ProjectionOptions& opts) {
    return project_impl(gen, p, sub, opts, true);
}

}  // namespace infgeo
