#include <doctest.h>

#include "support.hpp"

using namespace infgeo;
using namespace testsupport;
using doctest::Approx;

TEST_CASE("log_partition reference values") {
    CHECK(log_partition(FamilySpec::bernoulli(1)).value(vec({0.0})) ==
          Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(log_partition(FamilySpec::poisson(1)).value(vec({0.0})) == Approx(1.0));
    CHECK(log_partition(FamilySpec::euclidean_family(2)).value(vec({3.0, 4.0})) ==
          Approx(12.5));
    // Bernoulli normalizer by direct two-outcome summation.
    const double xi = 0.8;
    CHECK(log_partition(FamilySpec::bernoulli(1)).value(vec({xi})) ==
          Approx(std::log(1.0 + std::exp(xi))).epsilon(1e-14));
}

TEST_CASE("family spec validation") {
    CHECK_THROWS_AS(FamilySpec::gaussian(2, -1.0).validate(), ValidationError);
    CHECK_THROWS_AS(FamilySpec::gaussian(0, 1.0).validate(), ValidationError);
    CHECK_THROWS_AS(FamilySpec::custom_family(nullptr).validate(), ValidationError);
    CHECK_NOTHROW(FamilySpec::gaussian(3, 0.5).validate());
}

TEST_CASE("natural_to_mean reference values") {
    CHECK(natural_to_mean(FamilySpec::bernoulli(1), pt({0.0})).xi_star[0] == Approx(0.5));
    CHECK(natural_to_mean(FamilySpec::poisson(1), pt({0.0})).xi_star[0] == Approx(1.0));
    const DualCoords mean =
        natural_to_mean(FamilySpec::euclidean_family(2), pt({0.3, -0.7}));
    CHECK(mean.xi_star[0] == Approx(0.3));
    CHECK(mean.xi_star[1] == Approx(-0.7));
    // Gaussian with fixed variance: mean = variance * natural.
    CHECK(natural_to_mean(FamilySpec::gaussian(1, 2.0), pt({0.5})).xi_star[0] ==
          Approx(1.0));
}

TEST_CASE("mean parameter involution") {
    UniformRng rng(113);
    for (const FamilySpec& fam : all_families(3)) {
        for (int k = 0; k < 100; ++k) {
            const PrimalCoords xi(rng.uniform_vector(3, -2.0, 2.0));
            const PrimalCoords back = mean_to_natural(fam, natural_to_mean(fam, xi));
            CHECK((back.xi - xi.xi).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
}

TEST_CASE("kl_oracle closed forms") {
    const FamilySpec gauss = FamilySpec::gaussian(1, 1.0);
    CHECK(kl_oracle(gauss, pt({0.0}), pt({1.0})) == Approx(0.5).epsilon(1e-12));
    CHECK(kl_oracle(gauss, pt({0.7}), pt({0.7})) == 0.0);

    const FamilySpec bern = FamilySpec::bernoulli(1);
    CHECK(kl_oracle(bern, pt({0.0}), pt({std::log(3.0)})) ==
          Approx(0.14384103622589045).epsilon(1e-12));
    CHECK(kl_oracle(bern, pt({std::log(3.0)}), pt({0.0})) ==
          Approx(0.13081203594113694).epsilon(1e-12));

    const FamilySpec pois = FamilySpec::poisson(1);
    CHECK(kl_oracle(pois, pt({0.2}), pt({0.2})) == Approx(0.0).scale(1.0).epsilon(1e-14));
    // Against the analytic form lambda_a log(lambda_a/lambda_b) - lambda_a + lambda_b.
    const double la = std::exp(0.4), lb = std::exp(-0.3);
    CHECK(kl_oracle(pois, pt({0.4}), pt({-0.3})) ==
          Approx(la * std::log(la / lb) - la + lb).epsilon(1e-12));

    CHECK_THROWS_AS(
        kl_oracle(FamilySpec::custom_family(
                      std::make_shared<Generator>(quadratic_generator(1))),
                  pt({0.0}), pt({1.0})),
        ValidationError);
}

TEST_CASE("Bregman-KL identity across families") {
    UniformRng rng(127);
    for (const FamilySpec& fam : all_families(2)) {
        const Generator gen = log_partition(fam);
        for (int k = 0; k < 500; ++k) {
            const PrimalCoords a(rng.uniform_vector(2, -2.0, 2.0));
            const PrimalCoords b(rng.uniform_vector(2, -2.0, 2.0));
            CHECK(std::abs(bregman(gen, a, b) - kl_oracle(fam, b, a)) <= 1e-8);
        }
    }
}

TEST_CASE("Poisson truncation is converged") {
    const double lambda = 4.7;
    const int terms = detail::poisson_truncation_terms(lambda);
    const double kl1 = detail::poisson_kl_terms(lambda, 1.3, terms);
    const double kl2 = detail::poisson_kl_terms(lambda, 1.3, 2 * terms);
    CHECK(std::abs(kl1 - kl2) < 1e-12);
}

TEST_CASE("custom family delegates to the user generator") {
    const FamilySpec fam =
        FamilySpec::custom_family(std::make_shared<Generator>(exp_generator(2)));
    const Generator gen = log_partition(fam);
    CHECK(gen.value(vec({0.0, 0.0})) == Approx(2.0));
    CHECK(natural_to_mean(fam, pt({0.0, 1.0})).xi_star[1] == Approx(std::exp(1.0)));
}
