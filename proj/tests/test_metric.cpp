#include <doctest.h>

#include "support.hpp"

using namespace infgeo;
using namespace testsupport;
using doctest::Approx;

TEST_CASE("christoffel symbols of reference metrics") {
    // Constant metric: all symbols vanish.
    const MetricField euclid = euclidean_metric(2);
    const ChristoffelSymbols flat = christoffel(euclid, pt({0.3, -0.8}));
    for (const Matrix& gk : flat) CHECK(gk.cwiseAbs().maxCoeff() <= 1e-12);

    // G(x) = e^x in one dimension: Gamma = g^-1 g' / 2 = 1/2 everywhere.
    const MetricField expm = exp_metric_1d();
    CHECK(christoffel(expm, pt({0.0}))[0](0, 0) == Approx(0.5).epsilon(1e-7));
    CHECK(christoffel(expm, pt({1.3}))[0](0, 0) == Approx(0.5).epsilon(1e-7));

    // Bernoulli metric sigma(1-sigma): Gamma = (1 - 2 sigma)/2, zero at 0.
    const MetricField bern = MetricField::from_generator(softplus_generator(1));
    CHECK(christoffel(bern, pt({0.0}))[0](0, 0) == Approx(0.0).scale(1.0).epsilon(1e-8));
    const double xi = 0.7;
    CHECK(christoffel(bern, pt({xi}))[0](0, 0) ==
          Approx(0.5 * (1.0 - 2.0 * sigmoid(xi))).epsilon(1e-6));
}

TEST_CASE("christoffel symmetry is exact and degenerate metrics are rejected") {
    const MetricField bern = MetricField::from_generator(softplus_generator(3));
    UniformRng rng(71);
    for (int k = 0; k < 20; ++k) {
        const PrimalCoords p(rng.uniform_vector(3, -2.0, 2.0));
        const ChristoffelSymbols gamma = christoffel(bern, p);
        for (const Matrix& gk : gamma)
            CHECK((gk - gk.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }

    const MetricField singular(
        2, [](const Vector&) { return Matrix::Ones(2, 2).eval(); }, Signature::pseudo);
    CHECK_THROWS_AS(christoffel(singular, pt({0.0, 0.0})), DegenerateMetricError);
}

TEST_CASE("analytic metric partials match finite differences") {
    const MetricField fd_field = exp_metric_1d();
    const MetricField analytic(
        1, [](const Vector& x) { return Matrix::Constant(1, 1, std::exp(x[0])); },
        Signature::riemannian, {},
        [](const Vector& x, Index) { return Matrix::Constant(1, 1, std::exp(x[0])); });
    for (double x : {-0.5, 0.0, 1.1}) {
        const Vector p = vec({x});
        CHECK(fd_field.fundamental_partial(p, 0)(0, 0) ==
              Approx(analytic.fundamental_partial(p, 0)(0, 0)).epsilon(1e-6));
        CHECK(christoffel(analytic, PrimalCoords(p))[0](0, 0) == Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("classify_tangent sign convention") {
    const MetricField euclid = euclidean_metric(2);
    CHECK(classify_tangent(euclid, {pt({0.0, 0.0}), vec({1.0, 0.0})}) ==
          TangentClass::spacelike);
    CHECK(classify_tangent(euclid, {pt({0.0, 0.0}), vec({0.0, 0.0})}) ==
          TangentClass::lightlike);

    const MetricField mink = minkowski_metric_2d();
    CHECK(classify_tangent(mink, {pt({0.0, 0.0}), vec({1.0, 1.0})}) ==
          TangentClass::lightlike);
    CHECK(classify_tangent(mink, {pt({0.0, 0.0}), vec({0.5, 1.0})}) ==
          TangentClass::timelike);
    CHECK(classify_tangent(mink, {pt({0.0, 0.0}), vec({1.0, 0.5})}) ==
          TangentClass::spacelike);
}

TEST_CASE("riemannian signature enforces positive definiteness") {
    const MetricField bad(
        2,
        [](const Vector&) {
            Matrix g = Matrix::Identity(2, 2);
            g(1, 1) = -1.0;
            return g;
        },
        Signature::riemannian);
    CHECK_THROWS_AS(bad.fundamental(vec({0.0, 0.0})), ConvexityError);
}

TEST_CASE("metric field domain guard") {
    const MetricField restricted(
        1, [](const Vector& x) { return Matrix::Constant(1, 1, 1.0 / (x[0] * x[0])); },
        Signature::riemannian, [](const Vector& x) { return x[0] > 0.0; });
    CHECK(restricted.fundamental(vec({2.0}))(0, 0) == Approx(0.25));
    CHECK_THROWS_AS(restricted.fundamental(vec({-2.0})), DomainError);
    CHECK_THROWS_AS(christoffel(restricted, pt({-1.0})), DomainError);
}
