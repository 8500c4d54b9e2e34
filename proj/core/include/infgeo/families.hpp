#pragma once

#include <memory>

#include "infgeo/generator.hpp"

namespace infgeo {

enum class FamilyKind {
    euclidean,
    bernoulli_product,
    poisson_product,
    gaussian_fixed_variance,
    custom,
};

/// A concrete statistical family: a named kind with dimension and hyper
/// parameters, or a user generator for kind == custom.
struct FamilySpec {
    FamilyKind kind = FamilyKind::euclidean;
    Index dim = 1;
    double variance = 1.0;  // gaussian_fixed_variance only
    std::shared_ptr<const Generator> custom_generator;

    static FamilySpec euclidean_family(Index dim);
    static FamilySpec bernoulli(Index dim);
    static FamilySpec poisson(Index dim);
    static FamilySpec gaussian(Index dim, double variance);
    static FamilySpec custom_family(std::shared_ptr<const Generator> gen);

    /// Validates dim >= 1 and hyper parameters; throws ValidationError.
    void validate() const;
};

const char* family_kind_name(FamilyKind kind);

/// Log-partition generator of the family in natural coordinates:
/// euclidean |xi|^2/2, bernoulli sum log(1 + e^xi), poisson sum e^xi,
/// gaussian with fixed variance s^2: s^2 |xi|^2 / 2 (xi = mu / s^2).
/// Analytic gradients and Hessians throughout.
Generator log_partition(const FamilySpec& fam);

/// Natural -> mean parameters (probabilities, rates, means) through the
/// log-partition gradient.
DualCoords natural_to_mean(const FamilySpec& fam, const PrimalCoords& xi);

/// Mean -> natural parameters through the Legendre inverse.
PrimalCoords mean_to_natural(const FamilySpec& fam, const DualCoords& mean);

/// Closed-form / direct-summation KL divergence KL(p_a || p_b) between
/// family members with natural parameters a and b. Bernoulli and Poisson
/// sum directly over outcomes (Poisson truncated at tail mass < 1e-14);
/// Gaussian and Euclidean use the quadratic closed forms. Serves as the
/// independent oracle for the Bregman identity
///   bregman(log_partition(fam), a, b) = kl_oracle(fam, b, a).
double kl_oracle(const FamilySpec& fam, const PrimalCoords& a, const PrimalCoords& b);

namespace detail {
/// Poisson KL by direct summation with an explicit term cutoff; exposed
/// so tests can compare truncation levels.
double poisson_kl_terms(double lambda_a, double lambda_b, int max_terms);
/// Number of terms needed to push the Poisson tail mass below tail_eps.
int poisson_truncation_terms(double lambda, double tail_eps = 1e-14);
}  // namespace detail

}  // namespace infgeo
