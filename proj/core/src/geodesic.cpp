#include "infgeo/geodesic.hpp"

#include <Eigen/LU>
#include <cmath>
#include <optional>
#include <sstream>

#include "infgeo/errors.hpp"

namespace infgeo {

namespace {

double relative_drift(const std::vector<double>& series) {
    if (series.size() < 2) return 0.0;
    const double ref = series.front();
    double worst = 0.0;
    for (double v : series) worst = std::max(worst, std::abs(v - ref));
    const double denom = std::max(std::abs(ref), 1e-300);
    return worst / denom;
}

// Geodesic right-hand side: dx = v, dv^k = -v^T Gamma^k v.
struct GeodesicRhs {
    const MetricField& metric;

    void operator()(const Vector& x, const Vector& v, Vector& dx, Vector& dv) const {
        dx = v;
        const ChristoffelSymbols gamma = christoffel(metric, PrimalCoords(x));
        dv.resize(v.size());
        for (Index k = 0; k < v.size(); ++k) dv[k] = -v.dot(gamma[k] * v);
    }
};

struct StepOutcome {
    bool left_domain = false;
    Vector x, v;
};

// One RK4 step of the second-order system reduced to first order. Stage
// points outside the domain abort the step (finite-difference metric
// probes near the boundary count as outside); non-finite stages and
// metric breakdowns along the way raise IntegrationError at time t.
StepOutcome rk4_step(const MetricField& metric, const Vector& x, const Vector& v, double h,
                     double t) {
    GeodesicRhs rhs{metric};
    auto stage_ok = [&](const Vector& xs) {
        if (!xs.allFinite())
            throw IntegrationError("geodesic integration produced a non-finite state", t);
        return metric.in_domain(xs);
    };

    StepOutcome out;
    try {
        Vector k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v;
        rhs(x, v, k1x, k1v);

        Vector xs = x + 0.5 * h * k1x;
        if (!stage_ok(xs)) return {true, {}, {}};
        rhs(xs, v + 0.5 * h * k1v, k2x, k2v);

        xs = x + 0.5 * h * k2x;
        if (!stage_ok(xs)) return {true, {}, {}};
        rhs(xs, v + 0.5 * h * k2v, k3x, k3v);

        xs = x + h * k3x;
        if (!stage_ok(xs)) return {true, {}, {}};
        rhs(xs, v + h * k3v, k4x, k4v);

        out.x = x + h / 6.0 * (k1x + 2.0 * (k2x + k3x) + k4x);
        out.v = v + h / 6.0 * (k1v + 2.0 * (k2v + k3v) + k4v);
    } catch (const DomainError&) {
        // A finite-difference probe crossed the boundary: the step is not
        // representable inside the domain.
        return {true, {}, {}};
    } catch (const ConvexityError& e) {
        throw IntegrationError(std::string("geodesic integration broke down: ") + e.what(), t);
    } catch (const DegenerateMetricError& e) {
        throw IntegrationError(std::string("geodesic integration broke down: ") + e.what(), t);
    }
    if (!out.x.allFinite() || !out.v.allFinite())
        throw IntegrationError("geodesic integration produced a non-finite state", t);
    out.left_domain = !metric.in_domain(out.x);
    return out;
}

}  // namespace

double GeodesicSolution::kinetic_drift() const { return relative_drift(kinetic); }
double PhaseTrajectory::energy_drift() const { return relative_drift(energy); }

GeodesicSolution geodesic_shoot(const MetricField& metric, const TangentVector& start,
                                double t_end, double step) {
    if (step <= 0.0) throw ValidationError("geodesic_shoot: step must be positive");
    if (t_end <= 0.0) throw ValidationError("geodesic_shoot: t_end must be positive");
    metric.require_in_domain(start.base.xi, "geodesic_shoot");
    if (start.components.size() != metric.dim())
        throw ValidationError("geodesic_shoot: velocity has wrong dimension");

    // Uniform grid; the step is adjusted to divide t_end exactly so the
    // quadrature below sees equal spacing.
    const long n = std::max<long>(1, std::lround(t_end / step));
    const double h = t_end / static_cast<double>(n);

    GeodesicSolution sol;
    Vector x = start.base.xi;
    Vector v = start.components;
    auto append = [&](double t) {
        sol.times.push_back(t);
        sol.points.push_back(x);
        sol.velocities.push_back(v);
        sol.kinetic.push_back(metric.inner(x, v, v));
    };
    append(0.0);

    for (long i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * h;
        const StepOutcome out = rk4_step(metric, x, v, h, t);
        if (out.left_domain) {
            sol.terminal = TerminalStatus::left_domain;
            return sol;
        }
        x = out.x;
        v = out.v;
        append(static_cast<double>(i + 1) * h);
    }
    sol.terminal = TerminalStatus::completed;
    return sol;
}

GeodesicSolution geodesic_connect(const MetricField& metric, const PrimalCoords& p,
                                  const PrimalCoords& q, const ConnectOptions& opts) {
    metric.require_in_domain(p.xi, "geodesic_connect");
    metric.require_in_domain(q.xi, "geodesic_connect");

    // Zero-length fast path.
    if ((p.xi - q.xi).norm() == 0.0) {
        GeodesicSolution sol;
        sol.times = {0.0, 1.0};
        sol.points = {p.xi, p.xi};
        sol.velocities = {Vector::Zero(p.dim()), Vector::Zero(p.dim())};
        const Vector z = Vector::Zero(p.dim());
        sol.kinetic = {metric.inner(p.xi, z, z), metric.inner(p.xi, z, z)};
        return sol;
    }

    // Endpoint of the unit-time shot, or nothing when the shot leaves the
    // domain before t = 1.
    auto shoot_endpoint = [&](const Vector& v0) -> std::optional<GeodesicSolution> {
        GeodesicSolution sol = geodesic_shoot(metric, TangentVector{p, v0}, 1.0, opts.step);
        if (sol.terminal != TerminalStatus::completed) return std::nullopt;
        return sol;
    };

    const double accept = opts.tolerance * (1.0 + q.xi.norm());

    // Chart-affine initialization, backed off toward zero until the first
    // shot stays inside the domain.
    Vector v = q.xi - p.xi;
    std::optional<GeodesicSolution> current;
    for (int k = 0; k < 25 && !current; ++k) {
        try {
            current = shoot_endpoint(v);
        } catch (const IntegrationError&) {
            current.reset();
        }
        if (!current) v *= 0.5;
    }
    if (!current)
        throw UnreachableError(
            "geodesic_connect: every trial geodesic left the domain; endpoints may "
            "not be connected");

    Vector residual = current->endpoint() - q.xi;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        if (residual.norm() <= accept) return *current;

        // Finite-difference Jacobian of the endpoint map.
        const Index n = metric.dim();
        Matrix jac(n, n);
        bool jac_ok = true;
        for (Index k = 0; k < n && jac_ok; ++k) {
            const double hfd = 1e-6 * (1.0 + std::abs(v[k]));
            Vector vp = v, vm = v;
            vp[k] += hfd;
            vm[k] -= hfd;
            std::optional<GeodesicSolution> sp, sm;
            try {
                sp = shoot_endpoint(vp);
                sm = shoot_endpoint(vm);
            } catch (const IntegrationError&) {
            }
            if (sp && sm) {
                jac.col(k) = (sp->endpoint() - sm->endpoint()) / (2.0 * hfd);
            } else if (sp) {
                jac.col(k) = (sp->endpoint() - current->endpoint()) / hfd;
            } else if (sm) {
                jac.col(k) = (current->endpoint() - sm->endpoint()) / hfd;
            } else {
                jac_ok = false;
            }
        }
        if (!jac_ok)
            throw UnreachableError(
                "geodesic_connect: shooting Jacobian could not be evaluated near the "
                "domain boundary");

        Eigen::FullPivLU<Matrix> lu(jac);
        if (!lu.isInvertible())
            throw UnreachableError("geodesic_connect: singular shooting Jacobian");
        const Vector dv = lu.solve(-residual);

        double alpha = 1.0;
        bool accepted = false;
        for (int half = 0; half < opts.max_halvings; ++half) {
            std::optional<GeodesicSolution> trial;
            try {
                trial = shoot_endpoint(v + alpha * dv);
            } catch (const IntegrationError&) {
            }
            if (trial) {
                Vector r_try = trial->endpoint() - q.xi;
                if (r_try.norm() < residual.norm() || r_try.norm() <= accept) {
                    v += alpha * dv;
                    current = std::move(trial);
                    residual = std::move(r_try);
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            std::ostringstream os;
            os << "geodesic_connect: shooting stalled with endpoint error "
               << residual.norm();
            throw UnreachableError(os.str());
        }
    }
    if (residual.norm() <= accept) return *current;
    std::ostringstream os;
    os << "geodesic_connect: no convergence, endpoint error " << residual.norm();
    throw UnreachableError(os.str());
}

double arc_length(const MetricField& metric, const GeodesicSolution& curve) {
    if (curve.size() < 2) return 0.0;
    std::vector<double> speeds(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double k = metric.inner(curve.points[i], curve.velocities[i], curve.velocities[i]);
        if (k < 0.0) {
            if (metric.signature() == Signature::pseudo)
                throw SignatureError(
                    "arc_length: negative squared speed under a pseudo metric; use "
                    "classify_tangent to inspect causal type");
            // Riemannian metrics keep g(v,v) >= 0; tiny negatives are roundoff.
            speeds[i] = 0.0;
        } else {
            speeds[i] = std::sqrt(k);
        }
    }
    const double step = curve.times[1] - curve.times[0];
    return simpson(speeds, step);
}

double distance(const MetricField& metric, const PrimalCoords& p, const PrimalCoords& q,
                const ConnectOptions& opts) {
    if (metric.signature() != Signature::riemannian)
        throw SignatureError("distance: defined only for Riemannian metrics");
    metric.require_in_domain(p.xi, "distance");
    metric.require_in_domain(q.xi, "distance");
    if ((p.xi - q.xi).norm() == 0.0) return 0.0;
    try {
        return arc_length(metric, geodesic_connect(metric, p, q, opts));
    } catch (const UnreachableError&) {
        return infinite_distance;
    } catch (const IntegrationError&) {
        return infinite_distance;
    }
}

PhaseTrajectory hamiltonian_flow(const MetricField& metric, const PhasePoint& start,
                                 double t_end, double step) {
    if (step <= 0.0) throw ValidationError("hamiltonian_flow: step must be positive");
    if (t_end <= 0.0) throw ValidationError("hamiltonian_flow: t_end must be positive");
    metric.require_in_domain(start.q, "hamiltonian_flow");
    if (start.p.size() != metric.dim())
        throw ValidationError("hamiltonian_flow: momentum has wrong dimension");

    auto hamiltonian = [&](const Vector& q, const Vector& p) {
        return 0.5 * p.dot(metric.inverse_fundamental(q) * p);
    };
    // dq = G^-1 p, dp_i = -dH/dq_i with the positional derivative taken by
    // central differences of the inverse-metric quadratic form.
    auto rhs = [&](const Vector& q, const Vector& p, double t, Vector& dq, Vector& dp) {
        if (!q.allFinite() || !p.allFinite())
            throw IntegrationError("hamiltonian_flow produced a non-finite state", t);
        dq = metric.inverse_fundamental(q) * p;
        dp.resize(q.size());
        Vector qp = q, qm = q;
        for (Index i = 0; i < q.size(); ++i) {
            const double h = 1e-5 * (1.0 + std::abs(q[i]));
            qp[i] = q[i] + h;
            qm[i] = q[i] - h;
            dp[i] = -(hamiltonian(qp, p) - hamiltonian(qm, p)) / (2.0 * h);
            qp[i] = q[i];
            qm[i] = q[i];
        }
    };

    const long n = std::max<long>(1, std::lround(t_end / step));
    const double h = t_end / static_cast<double>(n);

    PhaseTrajectory traj;
    Vector q = start.q, p = start.p;
    auto append = [&](double t) {
        traj.times.push_back(t);
        traj.positions.push_back(q);
        traj.momenta.push_back(p);
        traj.energy.push_back(hamiltonian(q, p));
    };
    append(0.0);

    Vector k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
    for (long i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * h;
        bool left = false;
        auto stage = [&](const Vector& qs, const Vector& ps, Vector& dq, Vector& dp) {
            if (!qs.allFinite())
                throw IntegrationError("hamiltonian_flow produced a non-finite state", t);
            if (!metric.in_domain(qs)) {
                left = true;
                return;
            }
            try {
                rhs(qs, ps, t, dq, dp);
            } catch (const DomainError&) {
                left = true;
            } catch (const ConvexityError& e) {
                throw IntegrationError(std::string("hamiltonian_flow broke down: ") + e.what(),
                                       t);
            } catch (const DegenerateMetricError& e) {
                throw IntegrationError(std::string("hamiltonian_flow broke down: ") + e.what(),
                                       t);
            }
        };
        stage(q, p, k1q, k1p);
        if (!left) stage(q + 0.5 * h * k1q, p + 0.5 * h * k1p, k2q, k2p);
        if (!left) stage(q + 0.5 * h * k2q, p + 0.5 * h * k2p, k3q, k3p);
        if (!left) stage(q + h * k3q, p + h * k3p, k4q, k4p);
        if (left) {
            traj.terminal = TerminalStatus::left_domain;
            return traj;
        }
        q += h / 6.0 * (k1q + 2.0 * (k2q + k3q) + k4q);
        p += h / 6.0 * (k1p + 2.0 * (k2p + k3p) + k4p);
        if (!q.allFinite() || !p.allFinite())
            throw IntegrationError("hamiltonian_flow produced a non-finite state", t);
        if (!metric.in_domain(q)) {
            traj.terminal = TerminalStatus::left_domain;
            return traj;
        }
        append(static_cast<double>(i + 1) * h);
    }
    traj.terminal = TerminalStatus::completed;
    return traj;
}

}  // namespace infgeo
