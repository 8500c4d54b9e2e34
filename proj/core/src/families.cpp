#include "infgeo/families.hpp"

#include <cmath>

#include "infgeo/errors.hpp"

namespace infgeo {

namespace {

// Stable softplus and sigmoid.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

FamilySpec make_spec(FamilyKind kind, Index dim, double variance = 1.0) {
    FamilySpec fam;
    fam.kind = kind;
    fam.dim = dim;
    fam.variance = variance;
    return fam;
}
}  // namespace

FamilySpec FamilySpec::euclidean_family(Index dim) {
    return make_spec(FamilyKind::euclidean, dim);
}
FamilySpec FamilySpec::bernoulli(Index dim) {
    return make_spec(FamilyKind::bernoulli_product, dim);
}
FamilySpec FamilySpec::poisson(Index dim) {
    return make_spec(FamilyKind::poisson_product, dim);
}
FamilySpec FamilySpec::gaussian(Index dim, double variance) {
    return make_spec(FamilyKind::gaussian_fixed_variance, dim, variance);
}
FamilySpec FamilySpec::custom_family(std::shared_ptr<const Generator> gen) {
    FamilySpec fam;
    fam.kind = FamilyKind::custom;
    fam.dim = gen ? gen->dim() : 0;
    fam.custom_generator = std::move(gen);
    return fam;
}

void FamilySpec::validate() const {
    if (dim < 1) throw ValidationError("FamilySpec: dim must be >= 1");
    if (kind == FamilyKind::gaussian_fixed_variance && !(variance > 0.0))
        throw ValidationError("FamilySpec: variance must be positive");
    if (kind == FamilyKind::custom) {
        if (!custom_generator) throw ValidationError("FamilySpec: custom family without generator");
        if (custom_generator->dim() != dim)
            throw ValidationError("FamilySpec: custom generator dimension mismatch");
    }
}

const char* family_kind_name(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::euclidean: return "euclidean";
        case FamilyKind::bernoulli_product: return "bernoulli_product";
        case FamilyKind::poisson_product: return "poisson_product";
        case FamilyKind::gaussian_fixed_variance: return "gaussian_fixed_variance";
        case FamilyKind::custom: return "custom";
    }
    return "unknown";
}

Generator log_partition(const FamilySpec& fam) {
    fam.validate();
    const Index n = fam.dim;
    Generator::Options opts;
    opts.name = family_kind_name(fam.kind);

    switch (fam.kind) {
        case FamilyKind::euclidean: {
            opts.gradient = [](const Vector& xi) { return xi; };
            opts.hessian = [n](const Vector&) { return Matrix::Identity(n, n).eval(); };
            return Generator(n, [](const Vector& xi) { return 0.5 * xi.squaredNorm(); },
                             std::move(opts));
        }
        case FamilyKind::bernoulli_product: {
            opts.gradient = [](const Vector& xi) {
                return xi.unaryExpr([](double x) { return sigmoid(x); }).eval();
            };
            opts.hessian = [n](const Vector& xi) {
                Matrix h = Matrix::Zero(n, n);
                for (Index i = 0; i < n; ++i) {
                    const double s = sigmoid(xi[i]);
                    h(i, i) = s * (1.0 - s);
                }
                return h;
            };
            // Mean parameters are probabilities.
            opts.dual_domain = [](const Vector& m) {
                return (m.array() > 0.0).all() && (m.array() < 1.0).all();
            };
            return Generator(n,
                             [](const Vector& xi) {
                                 double s = 0.0;
                                 for (Index i = 0; i < xi.size(); ++i) s += softplus(xi[i]);
                                 return s;
                             },
                             std::move(opts));
        }
        case FamilyKind::poisson_product: {
            opts.gradient = [](const Vector& xi) { return xi.array().exp().matrix().eval(); };
            opts.hessian = [n](const Vector& xi) {
                Matrix h = Matrix::Zero(n, n);
                for (Index i = 0; i < n; ++i) h(i, i) = std::exp(xi[i]);
                return h;
            };
            // Mean parameters are rates.
            opts.dual_domain = [](const Vector& m) { return (m.array() > 0.0).all(); };
            return Generator(n, [](const Vector& xi) { return xi.array().exp().sum(); },
                             std::move(opts));
        }
        case FamilyKind::gaussian_fixed_variance: {
            const double s2 = fam.variance;
            opts.gradient = [s2](const Vector& xi) { return (s2 * xi).eval(); };
            opts.hessian = [n, s2](const Vector&) {
                return (s2 * Matrix::Identity(n, n)).eval();
            };
            return Generator(n,
                             [s2](const Vector& xi) { return 0.5 * s2 * xi.squaredNorm(); },
                             std::move(opts));
        }
        case FamilyKind::custom:
            return *fam.custom_generator;
    }
    throw ValidationError("log_partition: unknown family kind");
}

DualCoords natural_to_mean(const FamilySpec& fam, const PrimalCoords& xi) {
    return to_dual(log_partition(fam), xi);
}

PrimalCoords mean_to_natural(const FamilySpec& fam, const DualCoords& mean) {
    return from_dual(log_partition(fam), mean);
}

namespace detail {

int poisson_truncation_terms(double lambda, double tail_eps) {
    double pk = std::exp(-lambda);  // P(X = 0)
    double cum = pk;
    int k = 0;
    while (1.0 - cum > tail_eps && k < 200000) {
        ++k;
        pk *= lambda / static_cast<double>(k);
        cum += pk;
    }
    return k + 1;  // number of retained terms, outcomes 0..k
}

double poisson_kl_terms(double lambda_a, double lambda_b, int max_terms) {
    // sum_k p_k(lambda_a) * log(p_k(lambda_a) / p_k(lambda_b))
    //     = sum_k p_k * ((lambda_b - lambda_a) + k log(lambda_a / lambda_b))
    const double shift = lambda_b - lambda_a;
    const double ratio = std::log(lambda_a / lambda_b);
    double pk = std::exp(-lambda_a);
    double sum = pk * shift;
    for (int k = 1; k < max_terms; ++k) {
        pk *= lambda_a / static_cast<double>(k);
        sum += pk * (shift + static_cast<double>(k) * ratio);
    }
    return sum;
}

}  // namespace detail

double kl_oracle(const FamilySpec& fam, const PrimalCoords& a, const PrimalCoords& b) {
    fam.validate();
    const Generator gen = log_partition(fam);
    gen.require_in_domain(a.xi, "kl_oracle");
    gen.require_in_domain(b.xi, "kl_oracle");

    switch (fam.kind) {
        case FamilyKind::euclidean:
            return 0.5 * (a.xi - b.xi).squaredNorm();
        case FamilyKind::gaussian_fixed_variance: {
            // Natural parameter xi = mu / s^2.
            const Vector mu_a = fam.variance * a.xi;
            const Vector mu_b = fam.variance * b.xi;
            return 0.5 * (mu_a - mu_b).squaredNorm() / fam.variance;
        }
        case FamilyKind::bernoulli_product: {
            double sum = 0.0;
            for (Index i = 0; i < fam.dim; ++i) {
                const double pa = sigmoid(a.xi[i]);
                const double pb = sigmoid(b.xi[i]);
                sum += pa * std::log(pa / pb) + (1.0 - pa) * std::log((1.0 - pa) / (1.0 - pb));
            }
            return sum;
        }
        case FamilyKind::poisson_product: {
            double sum = 0.0;
            for (Index i = 0; i < fam.dim; ++i) {
                const double la = std::exp(a.xi[i]);
                const double lb = std::exp(b.xi[i]);
                sum += detail::poisson_kl_terms(la, lb, detail::poisson_truncation_terms(la));
            }
            return sum;
        }
        case FamilyKind::custom:
            throw ValidationError("kl_oracle: no closed form for custom families");
    }
    throw ValidationError("kl_oracle: unknown family kind");
}

}  // namespace infgeo
