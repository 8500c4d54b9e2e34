#include <benchmark/benchmark.h>

#include <cmath>

#include "infgeo/infgeo.hpp"

namespace {

using namespace infgeo;

Generator bernoulli_gen(Index dim) { return log_partition(FamilySpec::bernoulli(dim)); }

Vector ramp(Index dim, double lo, double hi) {
    Vector v(dim);
    for (Index i = 0; i < dim; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / std::max<Index>(1, dim - 1);
    return v;
}

void BM_ToDual(benchmark::State& state) {
    const Generator gen = bernoulli_gen(state.range(0));
    const PrimalCoords p(ramp(state.range(0), -1.5, 1.5));
    for (auto _ : state) benchmark::DoNotOptimize(to_dual(gen, p));
}
BENCHMARK(BM_ToDual)->Arg(2)->Arg(8)->Arg(32);

void BM_FromDual(benchmark::State& state) {
    const Generator gen = bernoulli_gen(state.range(0));
    const DualCoords d = to_dual(gen, PrimalCoords(ramp(state.range(0), -1.5, 1.5)));
    for (auto _ : state) benchmark::DoNotOptimize(from_dual(gen, d));
}
BENCHMARK(BM_FromDual)->Arg(2)->Arg(8)->Arg(32);

void BM_Bregman(benchmark::State& state) {
    const Generator gen = bernoulli_gen(state.range(0));
    const PrimalCoords p(ramp(state.range(0), -1.5, 1.5));
    const PrimalCoords q(ramp(state.range(0), 1.0, -0.5));
    for (auto _ : state) benchmark::DoNotOptimize(bregman(gen, p, q));
}
BENCHMARK(BM_Bregman)->Arg(2)->Arg(8)->Arg(32);

void BM_Christoffel(benchmark::State& state) {
    const MetricField metric = MetricField::from_generator(bernoulli_gen(state.range(0)));
    const PrimalCoords p(ramp(state.range(0), -1.0, 1.0));
    for (auto _ : state) benchmark::DoNotOptimize(christoffel(metric, p));
}
BENCHMARK(BM_Christoffel)->Arg(2)->Arg(4)->Arg(8);

void BM_GeodesicShoot(benchmark::State& state) {
    const MetricField metric = MetricField::from_generator(bernoulli_gen(2));
    const TangentVector start{PrimalCoords(ramp(2, -0.5, 0.5)), ramp(2, 0.4, 0.9)};
    const double step = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(geodesic_shoot(metric, start, 1.0, step));
}
BENCHMARK(BM_GeodesicShoot)->Arg(100)->Arg(1000);

void BM_GeodesicConnect(benchmark::State& state) {
    const MetricField metric = MetricField::from_generator(bernoulli_gen(2));
    const PrimalCoords p(ramp(2, -0.8, 0.2)), q(ramp(2, 0.7, -0.4));
    for (auto _ : state) benchmark::DoNotOptimize(geodesic_connect(metric, p, q));
}
BENCHMARK(BM_GeodesicConnect);

void BM_HamiltonianFlow(benchmark::State& state) {
    const MetricField metric = MetricField::from_generator(bernoulli_gen(2));
    const Vector q0 = ramp(2, -0.5, 0.5);
    const PhasePoint start{q0, metric.fundamental(q0) * ramp(2, 0.4, 0.9)};
    for (auto _ : state)
        benchmark::DoNotOptimize(hamiltonian_flow(metric, start, 1.0, 1e-2));
}
BENCHMARK(BM_HamiltonianFlow);

void BM_GeodesicProjection(benchmark::State& state) {
    const Generator gen = bernoulli_gen(2);
    Matrix dir(2, 1);
    dir << 1.0, 1.0;
    const AffineSubmanifold line(Chart::dual, Vector::Constant(2, 0.5), dir,
                                 Vector::Constant(2, 0.03), Vector::Constant(2, 0.97));
    const PrimalCoords p(ramp(2, -0.9, 0.9));
    for (auto _ : state) benchmark::DoNotOptimize(geodesic_projection(gen, p, line));
}
BENCHMARK(BM_GeodesicProjection);

void BM_KlOracle(benchmark::State& state) {
    const FamilySpec fam = FamilySpec::poisson(4);
    const PrimalCoords a(ramp(4, -1.0, 1.5)), b(ramp(4, 0.5, -0.5));
    for (auto _ : state) benchmark::DoNotOptimize(kl_oracle(fam, a, b));
}
BENCHMARK(BM_KlOracle);

}  // namespace

BENCHMARK_MAIN();
