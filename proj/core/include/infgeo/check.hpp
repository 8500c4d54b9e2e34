#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "infgeo/families.hpp"

namespace infgeo {

/// Outcome of one invariant suite run against a family.
struct SuiteResult {
    std::string name;
    bool passed = false;
    double max_residual = 0.0;
    double tolerance = 0.0;
    int samples = 0;
    std::string note;  // set when a suite is skipped (e.g. no KL oracle)
    bool skipped = false;
};

struct CheckOptions {
    std::uint64_t seed = 20240817u;
    int samples = 200;                      // pairs/points per suite
    std::vector<std::string> suites;        // empty: run all
    double sample_radius = 1.5;             // natural-parameter box half width
};

/// Names of all invariant suites, sorted.
std::vector<std::string> check_suite_names();

/// Runs the invariant suites for a family and reports one result per
/// suite, ordered by suite name. Each suite asserts the identities of the
/// corresponding module (Legendre involution and biconjugation, metric
/// duality, mixed representation, Bregman-KL, Pythagorean projection
/// identities, conservation along geodesics, distance axioms, ...) at its
/// stated tolerance. Residuals of convergence-rate style suites report
/// the excess over the allowed envelope, so a passing suite reports ~0.
std::vector<SuiteResult> run_check_suites(const FamilySpec& fam,
                                          const CheckOptions& opts = {});

}  // namespace infgeo
