#pragma once

#include <limits>

#include "infgeo/metric.hpp"

namespace infgeo {

enum class TerminalStatus { completed, left_domain };

/// Discretized geodesic: sample times, points, velocities, and the
/// kinetic term g(v, v) per sample. For a completed geodesic the kinetic
/// entries are constant up to integration error.
struct GeodesicSolution {
    std::vector<double> times;
    std::vector<Vector> points;
    std::vector<Vector> velocities;
    std::vector<double> kinetic;
    TerminalStatus terminal = TerminalStatus::completed;

    const Vector& endpoint() const { return points.back(); }
    const Vector& initial_velocity() const { return velocities.front(); }
    std::size_t size() const { return times.size(); }

    /// Largest relative drift of the kinetic term along the curve.
    double kinetic_drift() const;
};

/// Point of the cotangent bundle: position and conjugate momentum.
struct PhasePoint {
    Vector q;
    Vector p;
};

/// Discretized trajectory of Hamilton's equations with the energy
/// H = 1/2 p^T G(q)^-1 p recorded per sample.
struct PhaseTrajectory {
    std::vector<double> times;
    std::vector<Vector> positions;
    std::vector<Vector> momenta;
    std::vector<double> energy;
    TerminalStatus terminal = TerminalStatus::completed;

    double energy_drift() const;
};

/// Integrates the geodesic equation
///   d2x^k/dt2 + Gamma^k_ij dx^i/dt dx^j/dt = 0
/// with classical fourth-order Runge-Kutta from the given initial point
/// and velocity. Stops early with left_domain when the domain guard
/// fails; throws IntegrationError on non-finite state.
GeodesicSolution geodesic_shoot(const MetricField& metric, const TangentVector& start,
                                double t_end, double step);

struct ConnectOptions {
    double step = 1e-2;          // integration step on [0, 1]
    double tolerance = 1e-9;     // endpoint mismatch norm
    int max_iterations = 50;
    int max_halvings = 30;
};

/// Boundary value solve: a geodesic with gamma(0) = p, gamma(1) = q,
/// found by Newton shooting on the endpoint mismatch, initialized with
/// the chart-affine velocity q - p. Throws UnreachableError when the
/// shooting iteration cannot connect the points.
GeodesicSolution geodesic_connect(const MetricField& metric, const PrimalCoords& p,
                                  const PrimalCoords& q, const ConnectOptions& opts = {});

/// Arc length integral of sqrt(g(v, v)) over the sampled curve by
/// composite Simpson quadrature. Riemannian metrics only.
double arc_length(const MetricField& metric, const GeodesicSolution& curve);

constexpr double infinite_distance = std::numeric_limits<double>::infinity();

/// Geodesic distance: arc length of the connecting geodesic, or the
/// infinite sentinel when the points cannot be connected.
double distance(const MetricField& metric, const PrimalCoords& p, const PrimalCoords& q,
                const ConnectOptions& opts = {});

/// Integrates Hamilton's equations
///   dq/dt = dH/dp,  dp/dt = -dH/dq,   H(q, p) = 1/2 p^T G(q)^-1 p
/// with RK4; dH/dq by central differences of the inverse-metric
/// quadratic form.
PhaseTrajectory hamiltonian_flow(const MetricField& metric, const PhasePoint& start,
                                 double t_end, double step);

}  // namespace infgeo
