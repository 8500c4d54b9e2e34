#include <doctest.h>

#include <Eigen/QR>

#include "support.hpp"

using namespace infgeo;
using namespace testsupport;
using doctest::Approx;

namespace {

// Brute-force oracle: scan the 1-parameter submanifold at fixed
// resolution and return the best coordinate. Stays independent of the
// Newton path it checks.
double grid_search_u(const Generator& gen, const PrimalCoords& p, const AffineSubmanifold& sub,
                     double u_lo, double u_hi, double res, bool dual_variant) {
    double best_u = u_lo;
    double best_val = std::numeric_limits<double>::infinity();
    for (double u = u_lo; u <= u_hi + 0.5 * res; u += res) {
        PrimalCoords q;
        try {
            q = sub.point(gen, Vector::Constant(1, u));
        } catch (const Error&) {
            continue;
        }
        const double val = dual_variant ? bregman(gen, q, p) : bregman(gen, p, q);
        if (val < best_val) {
            best_val = val;
            best_u = u;
        }
    }
    return best_u;
}

}  // namespace

TEST_CASE("AffineSubmanifold construction rules") {
    CHECK_THROWS_AS(AffineSubmanifold(Chart::primal, vec({0.0, 0.0}), Matrix::Ones(2, 2)),
                    ValidationError);  // dependent columns
    Matrix wide(2, 3);
    wide.setIdentity();
    CHECK_THROWS_AS(AffineSubmanifold(Chart::primal, vec({0.0, 0.0}), wide), ValidationError);

    // Zero-dimensional submanifolds (a single point) are allowed.
    const AffineSubmanifold point(Chart::dual, vec({0.5}), Matrix(1, 0));
    CHECK(point.dim() == 0);
    CHECK(point.chart_point(Vector(0))[0] == 0.5);
}

TEST_CASE("primal and dual segments") {
    const Generator quad = quadratic_generator(2);
    CHECK((primal_segment(quad, pt({0.0, 0.0}), pt({2.0, 2.0}), 0.5).xi - vec({1.0, 1.0}))
              .norm() == 0.0);
    CHECK((primal_segment(quad, pt({0.3, 0.1}), pt({2.0, 2.0}), 0.0).xi - vec({0.3, 0.1}))
              .norm() == 0.0);
    CHECK((primal_segment(quad, pt({0.3, 0.1}), pt({2.0, 2.0}), 1.0).xi - vec({2.0, 2.0}))
              .norm() == 0.0);

    // Self-dual chart: both segments coincide.
    for (double t : {0.25, 0.5, 0.75}) {
        const Vector a = primal_segment(quad, pt({0.0, 1.0}), pt({2.0, -1.0}), t).xi;
        const Vector b = dual_segment(quad, pt({0.0, 1.0}), pt({2.0, -1.0}), t).xi;
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-9);
    }

    // Bernoulli: the dual chart is the mean chart, so the dual midpoint of
    // logit(0.2) and logit(0.8) sits at mean 0.5, i.e. xi = 0.
    const Generator soft = softplus_generator(1);
    const PrimalCoords mid =
        dual_segment(soft, pt({logit(0.2)}), pt({logit(0.8)}), 0.5);
    CHECK(mid.xi[0] == Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(dual_segment(soft, pt({logit(0.2)}), pt({logit(0.8)}), 0.0).xi[0] ==
          Approx(logit(0.2)).epsilon(1e-9));

    // A segment that exits a restricted (non-convex) domain is an error.
    Generator::Options ring_opts;
    ring_opts.domain = [](const Vector& x) { return std::abs(x[0]) > 0.5; };
    ring_opts.reference_point = vec({1.0});
    const Generator ring(1, [](const Vector& x) { return 0.5 * x.squaredNorm(); },
                         std::move(ring_opts));
    CHECK_THROWS_AS(primal_segment(ring, pt({-1.0}), pt({1.0}), 0.5), DomainError);
}

TEST_CASE("orthogonality defect on Euclidean triangles") {
    const Generator quad = quadratic_generator(2);
    const Triangle right{pt({0.0, 0.0}), pt({1.0, 0.0}), pt({1.0, 1.0})};
    CHECK(orthogonality_defect(quad, right) == Approx(0.0).scale(1.0));

    const Triangle degenerate{pt({0.3, 0.2}), pt({1.0, 0.0}), pt({1.0, 0.0})};
    CHECK(orthogonality_defect(quad, degenerate) == 0.0);

    // Collinear triangle: the legs at the corner Q point in opposite
    // directions, so the pairing is -1 (and matches the residual exactly).
    const Triangle collinear{pt({0.0, 0.0}), pt({1.0, 0.0}), pt({2.0, 0.0})};
    CHECK(orthogonality_defect(quad, collinear) == Approx(-1.0));
    CHECK(pythagoras_residual(quad, collinear) == Approx(-1.0));
}

TEST_CASE("Pythagorean identity on the right Euclidean triangle") {
    const Generator quad = quadratic_generator(2);
    const Triangle right{pt({0.0, 0.0}), pt({1.0, 0.0}), pt({1.0, 1.0})};
    // D[P||R] = 1 splits as 0.5 + 0.5.
    CHECK(bregman(quad, right.p, right.r) == Approx(1.0));
    CHECK(pythagoras_residual(quad, right) == Approx(0.0).scale(1.0));

    const Triangle degenerate{pt({0.4, -0.2}), pt({0.4, -0.2}), pt({1.0, 1.0})};
    CHECK(pythagoras_residual(quad, degenerate) == Approx(0.0).scale(1.0));
}

TEST_CASE("residual equals defect identically, both orientations") {
    UniformRng rng(101);
    for (const Generator& gen :
         {softplus_generator(2), exp_generator(2), quadratic_generator(2)}) {
        for (int k = 0; k < 200; ++k) {
            const Triangle tri{PrimalCoords(rng.uniform_vector(2, -2.0, 2.0)),
                               PrimalCoords(rng.uniform_vector(2, -2.0, 2.0)),
                               PrimalCoords(rng.uniform_vector(2, -2.0, 2.0))};
            CHECK(std::abs(pythagoras_residual(gen, tri) - orthogonality_defect(gen, tri)) <=
                  1e-9);
            CHECK(std::abs(dual_pythagoras_residual(gen, tri) -
                           dual_orthogonality_defect(gen, tri)) <= 1e-9);
        }
    }
}

TEST_CASE("geodesic_projection: Euclidean axis projection") {
    const Generator quad = quadratic_generator(2);
    Matrix axis(2, 1);
    axis << 1.0, 0.0;
    const AffineSubmanifold x_axis(Chart::primal, vec({0.0, 0.0}), axis);
    const ProjectionResult res = geodesic_projection(quad, pt({2.0, 3.0}), x_axis);
    CHECK((res.point.xi - vec({2.0, 0.0})).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(res.divergence == Approx(4.5).epsilon(1e-10));
}

TEST_CASE("geodesic_projection: whole space returns the point itself") {
    const Generator soft = softplus_generator(2);
    const AffineSubmanifold whole(Chart::primal, vec({0.0, 0.0}), Matrix::Identity(2, 2));
    const PrimalCoords p = pt({0.7, -1.1});
    const ProjectionResult res = geodesic_projection(soft, p, whole);
    CHECK((res.point.xi - p.xi).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(res.divergence <= 1e-12);
    const ProjectionResult res_dual = dual_geodesic_projection(soft, p, whole);
    CHECK((res_dual.point.xi - p.xi).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("geodesic_projection: equal-marginal Bernoulli set against grid oracle") {
    const Generator soft = softplus_generator(2);
    Matrix dir(2, 1);
    dir << 1.0, 1.0;
    const AffineSubmanifold equal_marginals(Chart::dual, vec({0.5, 0.5}), dir,
                                            vec({0.03, 0.03}), vec({0.97, 0.97}));
    const PrimalCoords p = pt({logit(0.3), logit(0.7)});
    const ProjectionResult res = geodesic_projection(soft, p, equal_marginals);

    // Closed form: the projection balances the marginals at 1/2.
    const Vector mean = to_dual(soft, res.point).xi_star;
    CHECK(mean[0] == Approx(0.5).epsilon(1e-8));
    CHECK(mean[1] == Approx(0.5).epsilon(1e-8));

    const double oracle_u =
        grid_search_u(soft, p, equal_marginals, -0.4, 0.4, 1e-4, false);
    CHECK(std::abs(res.u[0] - oracle_u) <= 2e-4);
}

TEST_CASE("dual_geodesic_projection: fixed-mean interval and grid oracle") {
    const Generator soft = softplus_generator(1);
    // The set {mu = 1/2} is a single dual-chart point.
    const AffineSubmanifold fixed_mean(Chart::dual, vec({0.5}), Matrix(1, 0));
    const ProjectionResult res =
        dual_geodesic_projection(soft, pt({logit(0.9)}), fixed_mean);
    CHECK(res.point.xi[0] == Approx(0.0).scale(1.0).epsilon(1e-9));

    // A genuine 1-D dual projection onto a primal-flat line, checked by
    // grid search on D[Q || P].
    const Generator soft2 = softplus_generator(2);
    Matrix dir(2, 1);
    dir << 1.0, 0.5;
    const AffineSubmanifold line(Chart::primal, vec({0.2, -0.3}), dir);
    const PrimalCoords p = pt({-0.9, 1.2});
    const ProjectionResult res2 = dual_geodesic_projection(soft2, p, line);
    const double oracle_u = grid_search_u(soft2, p, line, -2.0, 2.0, 1e-4, true);
    CHECK(std::abs(res2.u[0] - oracle_u) <= 2e-4);
    // Stationarity: the primal geodesic P -> Q meets the line orthogonally.
    CHECK(res2.gradient_norm <= 1e-9);
}

TEST_CASE("projection optimality against random submanifold samples") {
    const Generator soft = softplus_generator(2);
    UniformRng rng(103);
    Matrix dir(2, 1);
    dir << 0.7, -0.4;
    const AffineSubmanifold line(Chart::dual, vec({0.45, 0.55}), dir, vec({0.03, 0.03}),
                                 vec({0.97, 0.97}));
    const PrimalCoords p = pt({0.8, -0.5});
    const ProjectionResult res = geodesic_projection(soft, p, line);
    for (int k = 0; k < 1000; ++k) {
        const double u = rng.uniform(-0.6, 0.6);
        PrimalCoords q;
        try {
            q = line.point(soft, Vector::Constant(1, u));
        } catch (const Error&) {
            continue;
        }
        CHECK(res.divergence <= bregman(soft, p, q) + 1e-9);
    }
}

TEST_CASE("projection decomposition on dual-flat submanifolds") {
    const Generator soft = softplus_generator(2);
    UniformRng rng(107);
    Matrix dir(2, 1);
    dir << 1.0, -0.6;
    const AffineSubmanifold line(Chart::dual, vec({0.5, 0.5}), dir, vec({0.05, 0.05}),
                                 vec({0.95, 0.95}));
    const PrimalCoords p = pt({1.1, 0.3});
    const ProjectionResult proj = geodesic_projection(soft, p, line);
    for (int k = 0; k < 50; ++k) {
        PrimalCoords r;
        try {
            r = line.point(soft, Vector::Constant(1, rng.uniform(-0.4, 0.4)));
        } catch (const Error&) {
            continue;
        }
        const double lhs = bregman(soft, p, r);
        const double rhs = bregman(soft, p, proj.point) + bregman(soft, proj.point, r);
        CHECK(std::abs(lhs - rhs) <= 1e-8);
    }
}

TEST_CASE("Pythagorean and dual Pythagorean identities from projections") {
    const Generator soft = softplus_generator(2);
    UniformRng rng(109);
    for (int k = 0; k < 25; ++k) {
        // Geodesic projection onto a dual-flat line: primal identity.
        Matrix dir(2, 1);
        dir.col(0) = rng.uniform_vector(2, -1.0, 1.0).normalized();
        const Vector offset = vec({rng.uniform(0.35, 0.65), rng.uniform(0.35, 0.65)});
        const AffineSubmanifold line(Chart::dual, offset, dir, vec({0.05, 0.05}),
                                     vec({0.95, 0.95}));
        const PrimalCoords p(rng.uniform_vector(2, -1.2, 1.2));
        ProjectionResult proj;
        try {
            proj = geodesic_projection(soft, p, line);
        } catch (const ProjectionError&) {
            continue;
        }
        PrimalCoords r;
        try {
            r = line.point(soft, Vector::Constant(1, rng.uniform(-0.3, 0.3)));
        } catch (const Error&) {
            continue;
        }
        const Triangle tri{p, proj.point, r};
        CHECK(std::abs(pythagoras_residual(soft, tri)) <= 1e-8);
        CHECK(std::abs(orthogonality_defect(soft, tri)) <= 1e-8);

        // Dual projection onto a primal-flat line: dual identity.
        Matrix pdir(2, 1);
        pdir.col(0) = rng.uniform_vector(2, -1.0, 1.0).normalized();
        const AffineSubmanifold pline(Chart::primal,
                                      PrimalCoords(rng.uniform_vector(2, -1.0, 1.0)).xi, pdir);
        ProjectionResult dproj;
        try {
            dproj = dual_geodesic_projection(soft, p, pline);
        } catch (const ProjectionError&) {
            continue;
        }
        const PrimalCoords r2 = pline.point(soft, Vector::Constant(1, rng.uniform(-0.5, 0.5)));
        const Triangle dtri{p, dproj.point, r2};
        CHECK(std::abs(dual_pythagoras_residual(soft, dtri)) <= 1e-8);
        CHECK(std::abs(dual_orthogonality_defect(soft, dtri)) <= 1e-8);
    }
}

TEST_CASE("self-dual collapse: both projections coincide on Euclidean") {
    const Generator quad = quadratic_generator(2);
    Matrix dir(2, 1);
    dir << 0.6, 0.8;
    const AffineSubmanifold line(Chart::primal, vec({0.5, -0.25}), dir);
    const PrimalCoords p = pt({1.4, 0.9});
    const ProjectionResult a = geodesic_projection(quad, p, line);
    const ProjectionResult b = dual_geodesic_projection(quad, p, line);
    CHECK((a.point.xi - b.point.xi).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("chart flatness of affine submanifolds") {
    const Generator soft = softplus_generator(2);
    Matrix dir(2, 1);
    dir << 1.0, 0.25;

    // Primal-flat: segments between submanifold points stay on it exactly.
    const AffineSubmanifold pline(Chart::primal, vec({0.1, -0.2}), dir);
    const PrimalCoords a = pline.point(soft, Vector::Constant(1, -0.8));
    const PrimalCoords b = pline.point(soft, Vector::Constant(1, 1.1));
    for (double t : {0.2, 0.5, 0.9}) {
        const Vector x = primal_segment(soft, a, b, t).xi;
        const Vector u = dir.colPivHouseholderQr().solve(x - vec({0.1, -0.2}));
        CHECK((x - (vec({0.1, -0.2}) + dir * u)).cwiseAbs().maxCoeff() <= 1e-14);
    }

    // Dual-flat: dual segments stay on it within the inversion tolerance.
    const AffineSubmanifold dline(Chart::dual, vec({0.4, 0.5}), dir, vec({0.03, 0.03}),
                                  vec({0.97, 0.97}));
    const PrimalCoords c = dline.point(soft, Vector::Constant(1, -0.2));
    const PrimalCoords d = dline.point(soft, Vector::Constant(1, 0.3));
    for (double t : {0.25, 0.75}) {
        const Vector mean = to_dual(soft, dual_segment(soft, c, d, t)).xi_star;
        const Vector u = dir.colPivHouseholderQr().solve(mean - vec({0.4, 0.5}));
        CHECK((mean - (vec({0.4, 0.5}) + dir * u)).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("projection failure paths") {
    // Box-constrained line whose unconstrained optimum lies outside: the
    // iterate is pinned at the boundary and reported as a failure.
    const Generator soft = softplus_generator(1);
    Matrix one(1, 1);
    one << 1.0;
    const AffineSubmanifold boxed(Chart::dual, vec({0.125}), one, vec({0.05}), vec({0.2}));
    CHECK_THROWS_AS(geodesic_projection(soft, pt({logit(0.9)}), boxed), ProjectionError);
    try {
        geodesic_projection(soft, pt({logit(0.9)}), boxed);
    } catch (const ProjectionError& e) {
        REQUIRE(e.best_iterate.size() == 1);
        CHECK(e.best_iterate[0] <= logit(0.2) + 0.1);
    }
}

TEST_CASE("near-singular restricted Hessian sets the warning flag") {
    Generator::Options opts;
    opts.gradient = [](const Vector& x) { return vec({x[0], 1e12 * x[1]}); };
    opts.hessian = [](const Vector&) {
        Matrix h = Matrix::Zero(2, 2);
        h(0, 0) = 1.0;
        h(1, 1) = 1e12;
        return h;
    };
    const Generator skew(2,
                         [](const Vector& x) {
                             return 0.5 * (x[0] * x[0] + 1e12 * x[1] * x[1]);
                         },
                         std::move(opts));
    const AffineSubmanifold whole(Chart::dual, vec({0.0, 0.0}), Matrix::Identity(2, 2));
    const ProjectionResult res = geodesic_projection(skew, pt({0.5, 1e-7}), whole);
    CHECK(res.near_singular);
}
