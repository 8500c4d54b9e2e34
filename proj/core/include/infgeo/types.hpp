#pragma once

#include <Eigen/Core>

namespace infgeo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// The two affine charts of a dually flat manifold.
enum class Chart { primal, dual };

/// Parameter vector in the primal chart (natural parameters for
/// exponential families). The wrapper exists so primal and dual
/// coordinates cannot be mixed up at call sites.
struct PrimalCoords {
    Vector xi;

    PrimalCoords() = default;
    explicit PrimalCoords(Vector v) : xi(std::move(v)) {}
    Index dim() const { return xi.size(); }
};

/// Parameter vector in the dual chart, i.e. a point of the gradient
/// image of a generator (mean parameters for exponential families).
struct DualCoords {
    Vector xi_star;

    DualCoords() = default;
    explicit DualCoords(Vector v) : xi_star(std::move(v)) {}
    Index dim() const { return xi_star.size(); }
};

}  // namespace infgeo
