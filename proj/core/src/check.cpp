#include "infgeo/check.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "infgeo/divergence.hpp"
#include "infgeo/dually_flat.hpp"
#include "infgeo/errors.hpp"
#include "infgeo/geodesic.hpp"
#include "infgeo/metric.hpp"

namespace infgeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SuiteContext {
    const FamilySpec& fam;
    Generator gen;
    CheckOptions opts;
    UniformRng rng;

    SuiteContext(const FamilySpec& f, const CheckOptions& o)
        : fam(f), gen(log_partition(f)), opts(o), rng(o.seed) {}

    // Random in-domain natural parameter vector near the reference point.
    Vector sample_point(double radius_scale = 1.0) {
        const double r = opts.sample_radius * radius_scale;
        for (int tries = 0; tries < 200; ++tries) {
            Vector x = gen.reference_point() + rng.uniform_vector(gen.dim(), -r, r);
            if (gen.in_domain(x)) return x;
        }
        throw ValidationError("check: could not sample an in-domain point");
    }

    Vector random_unit(Index n) {
        for (int tries = 0; tries < 100; ++tries) {
            Vector d = rng.uniform_vector(n, -1.0, 1.0);
            const double norm = d.norm();
            if (norm > 1e-3) return d / norm;
        }
        throw ValidationError("check: degenerate random direction");
    }
};

// Family-specific clamp of the dual chart, used to box line submanifolds.
void dual_chart_clamps(const FamilySpec& fam, Index dim, std::optional<Vector>& lo,
                       std::optional<Vector>& hi) {
    switch (fam.kind) {
        case FamilyKind::bernoulli_product:
            lo = Vector::Constant(dim, 0.03);
            hi = Vector::Constant(dim, 0.97);
            break;
        case FamilyKind::poisson_product:
            lo = Vector::Constant(dim, 0.05);
            break;
        default:
            break;
    }
}

struct Line {
    AffineSubmanifold sub;
    double u_range;
};

// Random line submanifold through the image of a sampled point, with a
// backed-off parameter range that keeps the segment feasible.
Line random_line(SuiteContext& ctx, Chart chart) {
    const Index n = ctx.gen.dim();
    const Vector x0 = ctx.sample_point(0.8);
    const Vector offset = chart == Chart::primal ? x0 : to_dual(ctx.gen, PrimalCoords(x0)).xi_star;
    Matrix basis(n, 1);
    basis.col(0) = ctx.random_unit(n);

    std::optional<Vector> lo, hi;
    if (chart == Chart::dual) dual_chart_clamps(ctx.fam, n, lo, hi);
    AffineSubmanifold sub(chart, offset, basis, lo, hi);

    double range = 1.0;
    for (int k = 0; k < 25; ++k) {
        try {
            sub.point(ctx.gen, Vector::Constant(1, range));
            sub.point(ctx.gen, Vector::Constant(1, -range));
            return {sub, range};
        } catch (const Error&) {
            range *= 0.6;
        }
    }
    throw ValidationError("check: could not fit a feasible line submanifold");
}

using SuiteFn = std::function<void(SuiteContext&, SuiteResult&)>;

void suite_generator_contract(SuiteContext& ctx, SuiteResult& out) {
    out.tolerance = 1e-5;
    out.samples = ctx.opts.samples;
    for (int s = 0; s < out.samples; ++s) {
        const GeneratorDiagnostics d = diagnose_generator(ctx.gen, ctx.sample_point());
        out.max_residual = std::max({out.max_residual, d.hessian_asymmetry,
                                     std::max(0.0, d.negated_min_eigenvalue),
                                     d.gradient_fd_mismatch});
    }
}

void suite_legendre_involution(SuiteContext& ctx, SuiteResult& out) {
    out.tolerance = 1e-8;
    out.samples = ctx.opts.samples;
    for (int s = 0; s < out.samples; ++s) {
        const Vector x = ctx.sample_point();
        const PrimalCoords back = from_dual(ctx.gen, to_dual(ctx.gen, PrimalCoords(x)));
        out.max_residual = std::max(out.max_residual, (back.xi - x).cwiseAbs().maxCoeff());
    }
}

// The Legendre dual represented purely numerically: value through the
// conjugate maximum, derivatives by finite differences. Kept independent
// of the analytic dual route it is compared against.
Generator numeric_dual(const Generator& gen) {
    auto base = std::make_shared<const Generator>(gen);
    Generator::Options opts;
    opts.domain = [base](const Vector& s) { return base->in_dual_domain(s); };
    opts.dual_domain = [base](const Vector& x) { return base->in_domain(x); };
    opts.reference_point = base->gradient(base->reference_point());
    opts.name = "numeric_dual";
    return Generator(gen.dim(),
                     [base](const Vector& s) { return dual_value(*base, DualCoords(s)); },
                     std::move(opts));
}

void suite_legendre_biconjugation(SuiteContext& ctx, SuiteResult& out) {
    out.tolerance = 1e-7;
    out.samples = std::max(20, ctx.opts.samples / 8);
    const Generator nd = numeric_dual(ctx.gen);
    NewtonOptions nopts;
    nopts.tolerance = 1e-8;  // finite-difference gradients floor around 1e-10
    for (int s = 0; s < out.samples; ++s) {
        const Vector x = ctx.sample_point();
        const double psi_cc = dual_value(nd, DualCoords(x), nopts);
        out.max_residual =
            std::max(out.max_residual, std::abs(psi_cc - ctx.gen.value(x)));
    }
}

void suite_gradient_duality(SuiteContext& ctx, SuiteResult& out) {
    out.tolerance = 1e-5;
    out.samples = std::max(25, ctx.opts.samples / 4);
    for (int s = 0; s < out.samples; ++s) {
        const Vector x = ctx.sample_point();
        const DualCoords xs = to_dual(ctx.gen, PrimalCoords(x));
        const Vector g_fd = fd::gradient(
            [&](const Vector& t) { return dual_value(ctx.gen, DualCoords(t)); }, xs.xi_star);
        const Vector back = from_dual(ctx.gen, xs).xi;
        out.max_residual = std::max(out.max_residual, (g_fd - back).cwiseAbs().maxCoeff());
    }
}

void suite_hessian_inversion(SuiteContext& ctx, SuiteResult& out) {
    out.tolerance = 1e-5;
    out.samples = std::max(15, ctx.opts.samples / 10);
    for (int s = 0; s < out.samples; ++s) {
        const Vector x = ctx.sample_point();
        const DualCoords xs = to_dual(ctx.gen, PrimalCoords(x));
        const Matrix h_dual_fd = fd::hessian(
            [&](const Vector& t) { return dual_value(ctx.gen, DualCoords(t)); }, xs.xi_star);
        const Matrix h_inv = ctx.gen.hessian(x).inverse();
        out.max_residual =
            std::max(out.max_residual, (h_dual_fd - h_inv).cwiseAbs().maxCoeff());
    }
}

void suite_metric_duality(SuiteContext& ctx, SuiteResult& out) {
    out.tolerance = 1e-5;
    out.samples = std::max(15, ctx.opts.samples / 10);
    const Index n = ctx.gen.dim();
    for (int s = 0; s < out.samples; ++s) {
        const Vector x = ctx.sample_point();
        const DualCoords xs = to_dual(ctx.gen, PrimalCoords(x));
        const Matrix g = ctx.gen.hessian(x);
        const Matrix g_dual_fd = fd::hessian(
            [&](const Vector& t) { return dual_value(ctx.gen, DualCoords(t)); }, xs.xi_star);
        out.max_residual = std::max(
            out.max_residual,
            (g * g_dual_fd - Matrix::Identity(n, n)).cwiseAbs().maxCoeff());
    }
}

void suite_nonnegativity(SuiteContext& ctx, SuiteResult& out) {
    out.tolerance = 1e-12;
    out.samples = std::max(1000, ctx.opts.samples);
    for (int s = 0; s < out.samples; ++s) {
        const PrimalCoords p(ctx.sample_point()), q(ctx.sample_point());
        const double d = bregman(ctx.gen, p, q);
        out.max_residual = std::max(out.max_residual, -d);
        out.max_residual = std::max(out.max_residual, std::abs(bregman(ctx.gen, p, p)));
    }
}

void suite_mixed_agreement(SuiteContext& ctx, SuiteResult& out) {
    out.tolerance = 1e-9;
    out.samples = ctx.opts.samples;
    for (int s = 0; s < out.samples; ++s) {
        const PrimalCoords p(ctx.sample_point()), q(ctx.sample_point());
        const double direct = bregman(ctx.gen, p, q);
        const double mixed = mixed_bregman(ctx.gen, p, to_dual(ctx.gen, q));
        out.max_residual = std::max(out.max_residual, std::abs(direct - mixed));
    }
}

void suite_dual_divergence(SuiteContext& ctx, SuiteResult& out) {
    out.tolerance = 1e-6;
    out.samples = std::max(20, ctx.opts.samples / 8);
    const Generator nd = numeric_dual(ctx.gen);
    for (int s = 0; s < out.samples; ++s) {
        const PrimalCoords p(ctx.sample_point()), q(ctx.sample_point());
        const double direct = dual_bregman(ctx.gen, p, q);
        const double via_dual =
            bregman(nd, PrimalCoords(to_dual(ctx.gen, p).xi_star),
                    PrimalCoords(to_dual(ctx.gen, q).xi_star));
        out.max_residual = std::max(out.max_residual, std::abs(direct - via_dual));
    }
}

void suite_bregman_kl(SuiteContext& ctx, SuiteResult& out) {
    out.tolerance = 1e-8;
    if (ctx.fam.kind == FamilyKind::custom) {
        out.skipped = true;
        out.note = "no closed-form KL oracle for custom families";
        out.passed = true;
        return;
    }
    out.samples = std::max(500, ctx.opts.samples);
    for (int s = 0; s < out.samples; ++s) {
        const PrimalCoords a(ctx.sample_point()), b(ctx.sample_point());
        const double lhs = bregman(ctx.gen, a, b);
        const double rhs = kl_oracle(ctx.fam, b, a);
        out.max_residual = std::max(out.max_residual, std::abs(lhs - rhs));
    }
}

void suite_line_element(SuiteContext& ctx, SuiteResult& out) {
    out.tolerance = 1e-3;
    out.samples = std::max(20, ctx.opts.samples / 8);
    constexpr double scales[] = {1e-2, 1e-3, 1e-4};
    constexpr double noise_floor = 1e-7;
    for (int s = 0; s < out.samples; ++s) {
        const PrimalCoords p(ctx.sample_point());
        const Vector dir = ctx.random_unit(ctx.gen.dim());
        double err[3];
        for (int k = 0; k < 3; ++k) {
            const Vector dxi = scales[k] * dir;
            const double ratio =
                bregman(ctx.gen, PrimalCoords(p.xi + dxi), p) /
                local_quadratic(ctx.gen, p, dxi);
            err[k] = std::abs(ratio - 1.0);
        }
        // At least linear shrinkage per decade until the roundoff floor,
        // and the 1e-4 displacement lands within tolerance of 1.
        double excess = std::max(0.0, err[2] - out.tolerance);
        for (int k = 0; k < 2; ++k) {
            if (err[k] > noise_floor)
                excess = std::max(excess, err[k + 1] - 0.15 * err[k]);
        }
        out.max_residual = std::max(out.max_residual, std::max(0.0, excess));
    }
}

void suite_conservation(SuiteContext& ctx, SuiteResult& out) {
    out.tolerance = 1e-6;
    out.samples = 3;
    const MetricField metric = MetricField::from_generator(ctx.gen);
    for (int s = 0; s < out.samples; ++s) {
        const Vector x0 = ctx.sample_point(0.7);
        const Vector v0 = ctx.random_unit(ctx.gen.dim());
        const GeodesicSolution sol =
            geodesic_shoot(metric, TangentVector{PrimalCoords(x0), v0}, 1.0, 1e-3);
        if (sol.terminal == TerminalStatus::completed)
            out.max_residual = std::max(out.max_residual, sol.kinetic_drift());

        const Vector p0 = metric.fundamental(x0) * v0;
        const PhaseTrajectory traj = hamiltonian_flow(metric, PhasePoint{x0, p0}, 1.0, 1e-3);
        if (traj.terminal == TerminalStatus::completed)
            out.max_residual = std::max(out.max_residual, traj.energy_drift());
    }
}

void suite_hamiltonian_consistency(SuiteContext& ctx, SuiteResult& out) {
    out.tolerance = 1e-6;
    out.samples = 3;
    const MetricField metric = MetricField::from_generator(ctx.gen);
    for (int s = 0; s < out.samples; ++s) {
        const Vector x0 = ctx.sample_point(0.7);
        const Vector v0 = ctx.random_unit(ctx.gen.dim());
        const GeodesicSolution sol =
            geodesic_shoot(metric, TangentVector{PrimalCoords(x0), v0}, 1.0, 1e-3);
        const Vector p0 = metric.fundamental(x0) * v0;
        const PhaseTrajectory traj = hamiltonian_flow(metric, PhasePoint{x0, p0}, 1.0, 1e-3);
        if (sol.terminal != TerminalStatus::completed ||
            traj.terminal != TerminalStatus::completed)
            continue;
        out.max_residual = std::max(
            out.max_residual, (sol.endpoint() - traj.positions.back()).cwiseAbs().maxCoeff());
    }
}

void suite_distance_axioms(SuiteContext& ctx, SuiteResult& out) {
    out.tolerance = 1e-6;
    out.samples = std::max(3, ctx.opts.samples / 60);
    const MetricField metric = MetricField::from_generator(ctx.gen);
    for (int s = 0; s < out.samples; ++s) {
        const PrimalCoords p(ctx.sample_point(0.6)), q(ctx.sample_point(0.6)),
            r(ctx.sample_point(0.6));
        out.max_residual = std::max(out.max_residual, distance(metric, p, p));
        const double dpq = distance(metric, p, q);
        const double dqp = distance(metric, q, p);
        const double dqr = distance(metric, q, r);
        const double dpr = distance(metric, p, r);
        out.max_residual = std::max(out.max_residual, std::abs(dpq - dqp));
        out.max_residual = std::max(out.max_residual, dpr - (dpq + dqr));
    }
}

void suite_projection_pythagoras(SuiteContext& ctx, SuiteResult& out) {
    out.tolerance = 1e-7;
    out.samples = std::max(10, ctx.opts.samples / 10);
    for (int s = 0; s < out.samples; ++s) {
        for (const bool dual_variant : {false, true}) {
            const Line line = random_line(ctx, dual_variant ? Chart::primal : Chart::dual);
            const PrimalCoords p(ctx.sample_point(0.8));
            ProjectionResult proj;
            try {
                proj = dual_variant ? dual_geodesic_projection(ctx.gen, p, line.sub)
                                    : geodesic_projection(ctx.gen, p, line.sub);
            } catch (const ProjectionError&) {
                continue;  // boundary-pinned draw, not a identity failure
            }
            const double ur = ctx.rng.uniform(-line.u_range, line.u_range);
            PrimalCoords r;
            try {
                r = line.sub.point(ctx.gen, Vector::Constant(1, ur));
            } catch (const Error&) {
                continue;
            }
            const Triangle tri{p, proj.point, r};
            const double resid = dual_variant ? dual_pythagoras_residual(ctx.gen, tri)
                                              : pythagoras_residual(ctx.gen, tri);
            const double defect = dual_variant ? dual_orthogonality_defect(ctx.gen, tri)
                                               : orthogonality_defect(ctx.gen, tri);
            out.max_residual = std::max(out.max_residual, std::abs(resid));
            out.max_residual = std::max(out.max_residual, std::abs(resid - defect));
        }
    }
}

void suite_projection_optimality(SuiteContext& ctx, SuiteResult& out) {
    out.tolerance = 1e-7;
    out.samples = std::max(10, ctx.opts.samples / 20);
    for (int s = 0; s < out.samples; ++s) {
        for (const bool dual_variant : {false, true}) {
            const Line line = random_line(ctx, dual_variant ? Chart::primal : Chart::dual);
            const PrimalCoords p(ctx.sample_point(0.8));
            ProjectionResult proj;
            try {
                proj = dual_variant ? dual_geodesic_projection(ctx.gen, p, line.sub)
                                    : geodesic_projection(ctx.gen, p, line.sub);
            } catch (const ProjectionError&) {
                continue;
            }
            // The Newton solution must not lose to random submanifold samples.
            for (int k = 0; k < 100; ++k) {
                const double ur = ctx.rng.uniform(-line.u_range, line.u_range);
                PrimalCoords cand;
                try {
                    cand = line.sub.point(ctx.gen, Vector::Constant(1, ur));
                } catch (const Error&) {
                    continue;
                }
                const double d_cand = dual_variant ? bregman(ctx.gen, cand, p)
                                                   : bregman(ctx.gen, p, cand);
                out.max_residual = std::max(out.max_residual, proj.divergence - d_cand);
            }
            // Scaled stationarity at the solution.
            out.max_residual = std::max(out.max_residual, proj.gradient_norm);
        }
    }
}

const std::map<std::string, SuiteFn>& suite_table() {
    static const std::map<std::string, SuiteFn> table = {
        {"bregman_kl_identity", suite_bregman_kl},
        {"conservation", suite_conservation},
        {"distance_axioms", suite_distance_axioms},
        {"dual_divergence", suite_dual_divergence},
        {"generator_contract", suite_generator_contract},
        {"gradient_duality", suite_gradient_duality},
        {"hamiltonian_consistency", suite_hamiltonian_consistency},
        {"hessian_inversion", suite_hessian_inversion},
        {"legendre_biconjugation", suite_legendre_biconjugation},
        {"legendre_involution", suite_legendre_involution},
        {"line_element", suite_line_element},
        {"metric_duality", suite_metric_duality},
        {"mixed_agreement", suite_mixed_agreement},
        {"nonnegativity", suite_nonnegativity},
        {"projection_optimality", suite_projection_optimality},
        {"projection_pythagoras", suite_projection_pythagoras},
    };
    return table;
}

}  // namespace

std::vector<std::string> check_suite_names() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : suite_table()) names.push_back(name);
    return names;
}

std::vector<SuiteResult> run_check_suites(const FamilySpec& fam, const CheckOptions& opts) {
    fam.validate();
    std::vector<std::string> selected = opts.suites;
    if (selected.empty()) selected = check_suite_names();
    std::sort(selected.begin(), selected.end());
    selected.erase(std::unique(selected.begin(), selected.end()), selected.end());

    std::vector<SuiteResult> results;
    for (const std::string& name : selected) {
        auto it = suite_table().find(name);
        if (it == suite_table().end())
            throw ValidationError("check: unknown suite '" + name + "'");
        // Fresh deterministic context per suite, so suite selection does
        // not change the draws of the remaining suites.
        SuiteContext ctx(fam, opts);
        SuiteResult result;
        result.name = name;
        try {
            it->second(ctx, result);
            if (!result.skipped) result.passed = result.max_residual <= result.tolerance;
        } catch (const Error& e) {
            result.passed = false;
            result.max_residual = kInf;
            result.note = e.what();
        }
        results.push_back(std::move(result));
    }
    return results;
}

}  // namespace infgeo
