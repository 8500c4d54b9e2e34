#pragma once

// Shared fixtures for the unit and acceptance suites: reference
// generators with known closed forms, family lists, and sampling helpers.

#include <Eigen/Dense>
#include <cmath>

#include "infgeo/infgeo.hpp"

namespace testsupport {

using namespace infgeo;

inline double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}
inline double logit(double m) { return std::log(m / (1.0 - m)); }

inline Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Index>(values.size()));
    Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

inline PrimalCoords pt(std::initializer_list<double> values) {
    return PrimalCoords(vec(values));
}

// psi(x) = |x|^2 / 2, the self-dual Euclidean generator.
inline Generator quadratic_generator(Index dim) {
    Generator::Options opts;
    opts.gradient = [](const Vector& x) { return x; };
    opts.hessian = [dim](const Vector&) { return Matrix::Identity(dim, dim).eval(); };
    opts.name = "quadratic";
    return Generator(dim, [](const Vector& x) { return 0.5 * x.squaredNorm(); },
                     std::move(opts));
}

// psi(x) = sum exp(x_i); value-only so gradients and Hessians exercise the
// finite-difference routes.
inline Generator exp_generator_fd(Index dim) {
    Generator::Options opts;
    opts.name = "sum_exp_fd";
    opts.dual_domain = [](const Vector& s) { return (s.array() > 0.0).all(); };
    return Generator(dim, [](const Vector& x) { return x.array().exp().sum(); },
                     std::move(opts));
}

// psi(x) = sum exp(x_i) with analytic derivatives.
inline Generator exp_generator(Index dim) {
    Generator::Options opts;
    opts.name = "sum_exp";
    opts.gradient = [](const Vector& x) { return x.array().exp().matrix().eval(); };
    opts.hessian = [dim](const Vector& x) {
        Matrix h = Matrix::Zero(dim, dim);
        for (Index i = 0; i < dim; ++i) h(i, i) = std::exp(x[i]);
        return h;
    };
    opts.dual_domain = [](const Vector& s) { return (s.array() > 0.0).all(); };
    return Generator(dim, [](const Vector& x) { return x.array().exp().sum(); },
                     std::move(opts));
}

// psi(x) = sum log(1 + exp(x_i)), the Bernoulli log-partition.
inline Generator softplus_generator(Index dim) {
    Generator::Options opts;
    opts.name = "softplus";
    opts.gradient = [](const Vector& x) {
        return x.unaryExpr([](double t) { return sigmoid(t); }).eval();
    };
    opts.hessian = [dim](const Vector& x) {
        Matrix h = Matrix::Zero(dim, dim);
        for (Index i = 0; i < dim; ++i) {
            const double s = sigmoid(x[i]);
            h(i, i) = s * (1.0 - s);
        }
        return h;
    };
    opts.dual_domain = [](const Vector& s) {
        return (s.array() > 0.0).all() && (s.array() < 1.0).all();
    };
    return Generator(dim,
                     [](const Vector& x) {
                         double total = 0.0;
                         for (Index i = 0; i < x.size(); ++i)
                             total += x[i] > 0.0 ? x[i] + std::log1p(std::exp(-x[i]))
                                                 : std::log1p(std::exp(x[i]));
                         return total;
                     },
                     std::move(opts));
}

// psi(x) = -sum log(x_i) on the positive orthant; restricted domain.
inline Generator log_barrier_generator(Index dim) {
    Generator::Options opts;
    opts.name = "log_barrier";
    opts.domain = [](const Vector& x) { return (x.array() > 0.0).all(); };
    opts.dual_domain = [](const Vector& s) { return (s.array() < 0.0).all(); };
    opts.gradient = [](const Vector& x) { return (-x.array().inverse()).matrix().eval(); };
    opts.hessian = [dim](const Vector& x) {
        Matrix h = Matrix::Zero(dim, dim);
        for (Index i = 0; i < dim; ++i) h(i, i) = 1.0 / (x[i] * x[i]);
        return h;
    };
    opts.reference_point = Vector::Ones(dim);
    return Generator(dim, [](const Vector& x) { return -x.array().log().sum(); },
                     std::move(opts));
}

// 1-D metric G(x) = e^x. Geodesics solve xdd + xd^2/2 = 0 with the closed
// form x(t) = x0 + 2 log(1 + u0 t / 2).
inline MetricField exp_metric_1d() {
    return MetricField(
        1, [](const Vector& x) { return Matrix::Constant(1, 1, std::exp(x[0])); },
        Signature::riemannian);
}

inline double exp_metric_geodesic(double x0, double u0, double t) {
    return x0 + 2.0 * std::log(1.0 + 0.5 * u0 * t);
}

inline MetricField euclidean_metric(Index dim) {
    return MetricField(
        dim, [dim](const Vector&) { return Matrix::Identity(dim, dim).eval(); },
        Signature::riemannian);
}

inline MetricField minkowski_metric_2d() {
    return MetricField(
        2,
        [](const Vector&) {
            Matrix g = Matrix::Identity(2, 2);
            g(1, 1) = -1.0;
            return g;
        },
        Signature::pseudo);
}

inline std::vector<FamilySpec> all_families(Index dim = 2) {
    return {FamilySpec::euclidean_family(dim), FamilySpec::bernoulli(dim),
            FamilySpec::poisson(dim), FamilySpec::gaussian(dim, 2.0)};
}

// In-domain natural-parameter sample near the reference point.
inline Vector sample_in_domain(const Generator& gen, UniformRng& rng, double radius) {
    for (int tries = 0; tries < 200; ++tries) {
        Vector x = gen.reference_point() + rng.uniform_vector(gen.dim(), -radius, radius);
        if (gen.in_domain(x)) return x;
    }
    throw std::runtime_error("sample_in_domain: no luck");
}

}  // namespace testsupport
