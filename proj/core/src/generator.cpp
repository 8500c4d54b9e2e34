#include "infgeo/generator.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "infgeo/errors.hpp"

namespace infgeo {

namespace {

std::string describe_point(const Vector& xi) {
    std::ostringstream os;
    os << "(";
    for (Index i = 0; i < xi.size(); ++i) {
        if (i) os << ", ";
        os << xi[i];
    }
    os << ")";
    return os.str();
}

}  // namespace

Generator::Generator(Index dim, ScalarFn value, Options opts)
    : dim_(dim),
      value_(std::move(value)),
      analytic_gradient_(std::move(opts.gradient)),
      analytic_hessian_(std::move(opts.hessian)),
      domain_(std::move(opts.domain)),
      dual_domain_(std::move(opts.dual_domain)),
      name_(std::move(opts.name)) {
    if (dim_ < 1) throw ValidationError("Generator: dim must be >= 1");
    if (!value_) throw ValidationError("Generator: value map is required");
    reference_ = opts.reference_point ? *opts.reference_point : Vector::Zero(dim_);
    if (reference_.size() != dim_)
        throw ValidationError("Generator: reference point has wrong dimension");
}

bool Generator::in_domain(const Vector& xi) const {
    if (xi.size() != dim_) return false;
    return domain_ ? domain_(xi) : true;
}

void Generator::require_in_domain(const Vector& xi, const char* where) const {
    if (xi.size() != dim_) {
        std::ostringstream os;
        os << where << ": point has dimension " << xi.size() << ", expected " << dim_;
        throw DomainError(os.str());
    }
    if (!in_domain(xi)) {
        std::ostringstream os;
        os << where << ": point " << describe_point(xi) << " is outside the domain of "
           << (name_.empty() ? "the generator" : name_);
        throw DomainError(os.str());
    }
}

double Generator::value(const Vector& xi) const {
    require_in_domain(xi, "Generator::value");
    return value_(xi);
}

Vector Generator::gradient(const Vector& xi) const {
    require_in_domain(xi, "Generator::gradient");
    if (analytic_gradient_) return analytic_gradient_(xi);
    return fd::gradient(value_, xi);
}

Matrix Generator::raw_hessian(const Vector& xi) const {
    require_in_domain(xi, "Generator::hessian");
    if (analytic_hessian_) return analytic_hessian_(xi);
    if (analytic_gradient_) return fd::jacobian(analytic_gradient_, xi, 1e-6);
    return fd::hessian(value_, xi);
}

Matrix Generator::hessian(const Vector& xi) const {
    const Matrix h = raw_hessian(xi);
    return 0.5 * (h + h.transpose());
}

bool Generator::in_dual_domain(const Vector& xi_star) const {
    if (xi_star.size() != dim_) return false;
    if (dual_domain_) return dual_domain_(xi_star);
    try {
        from_dual(*this, DualCoords(xi_star));
        return true;
    } catch (const Error&) {
        return false;
    }
}

DualCoords to_dual(const Generator& gen, const PrimalCoords& p) {
    gen.require_in_domain(p.xi, "to_dual");
    return DualCoords(gen.gradient(p.xi));
}

PrimalCoords from_dual(const Generator& gen, const DualCoords& d, const NewtonOptions& opts) {
    if (d.xi_star.size() != gen.dim())
        throw DomainError("from_dual: dual point has wrong dimension");
    const Vector& target = d.xi_star;
    Vector x = opts.hint ? *opts.hint : gen.reference_point();
    if (!gen.in_domain(x))
        throw DomainError(
            "from_dual: Newton start is outside the domain; supply a hint or a "
            "reference point in the domain");

    const double accept = opts.tolerance * (1.0 + target.norm());
    Vector residual = gen.gradient(x) - target;
    double rnorm = residual.norm();

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        if (rnorm <= accept) return PrimalCoords(x);

        Matrix h = gen.hessian(x);
        Eigen::LDLT<Matrix> ldlt(h);
        if (ldlt.info() != Eigen::Success) {
            throw InversionError("from_dual: Hessian factorization failed", rnorm, x);
        }
        const Vector dx = ldlt.solve(-residual);

        // Damping: halve the step until the point stays in the domain and
        // the residual decreases.
        double alpha = 1.0;
        bool accepted = false;
        for (int half = 0; half < opts.max_halvings; ++half) {
            Vector x_try = x + alpha * dx;
            if (gen.in_domain(x_try)) {
                Vector r_try = gen.gradient(x_try) - target;
                const double rn_try = r_try.norm();
                if (std::isfinite(rn_try) && (rn_try < rnorm || rn_try <= accept)) {
                    x = std::move(x_try);
                    residual = std::move(r_try);
                    rnorm = rn_try;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            throw InversionError(
                "from_dual: damped Newton stalled (target may lie outside the "
                "gradient image)",
                rnorm, x);
        }
    }
    if (rnorm <= accept) return PrimalCoords(x);
    throw InversionError("from_dual: Newton did not converge within the iteration budget",
                         rnorm, x);
}

double dual_value(const Generator& gen, const DualCoords& d, const NewtonOptions& opts) {
    const PrimalCoords xi = from_dual(gen, d, opts);
    return xi.xi.dot(d.xi_star) - gen.value(xi.xi);
}

Generator legendre_dual(const Generator& gen) {
    auto base = std::make_shared<const Generator>(gen);
    Generator::Options opts;
    opts.gradient = [base](const Vector& xs) { return from_dual(*base, DualCoords(xs)).xi; };
    opts.hessian = [base](const Vector& xs) {
        const Vector x = from_dual(*base, DualCoords(xs)).xi;
        return base->hessian(x).inverse().eval();
    };
    opts.domain = [base](const Vector& xs) { return base->in_dual_domain(xs); };
    opts.dual_domain = [base](const Vector& x) { return base->in_domain(x); };
    opts.reference_point = base->gradient(base->reference_point());
    opts.name = (gen.name().empty() ? std::string("psi") : gen.name()) + "*";
    return Generator(gen.dim(),
                     [base](const Vector& xs) { return dual_value(*base, DualCoords(xs)); },
                     std::move(opts));
}

GeneratorDiagnostics diagnose_generator(const Generator& gen, const Vector& xi) {
    GeneratorDiagnostics diag{};
    const Matrix raw = gen.raw_hessian(xi);
    const double scale = 1.0 + raw.cwiseAbs().maxCoeff();
    diag.hessian_asymmetry = (raw - raw.transpose()).cwiseAbs().maxCoeff() / scale;

    Eigen::SelfAdjointEigenSolver<Matrix> eig(gen.hessian(xi));
    diag.negated_min_eigenvalue = -eig.eigenvalues().minCoeff();

    const Vector g = gen.gradient(xi);
    const Vector g_fd = fd::gradient([&gen](const Vector& x) { return gen.value(x); }, xi);
    diag.gradient_fd_mismatch =
        (g - g_fd).cwiseAbs().maxCoeff() / (1.0 + g.cwiseAbs().maxCoeff());
    return diag;
}

}  // namespace infgeo
