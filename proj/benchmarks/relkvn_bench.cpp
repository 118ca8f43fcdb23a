#include <benchmark/benchmark.h>

#include "relkvn/generators.hpp"
#include "relkvn/parse.hpp"
#include "relkvn/phase_flow.hpp"
#include "relkvn/series.hpp"

namespace {

using namespace relkvn;

void BM_ParseScalar(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(symbolic::parse_scalar("m0/sqrt(1 - v1^2 - v2^2 - v3^2) + B0*x2*v1"));
}
BENCHMARK(BM_ParseScalar);

void BM_CommutatorBoostLiouvillian(benchmark::State& state) {
  const auto gen = generators::build_free_generators(symbolic::param("m0"));
  for (auto _ : state) benchmark::DoNotOptimize(algebra::commutator(gen.K[0], gen.L));
}
BENCHMARK(BM_CommutatorBoostLiouvillian)->Unit(benchmark::kMicrosecond);

void BM_FreeClosure(benchmark::State& state) {
  const auto gen = generators::build_free_generators(symbolic::param("m0"));
  symbolic::ProbeOptions o;
  o.trials = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generators::verify_poincare_closure(gen, o));
}
BENCHMARK(BM_FreeClosure)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_AdjointSeriesC1(benchmark::State& state) {
  const auto X = series::c1_exponent();
  const auto Y = algebra::V(3);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(series::adjoint_series(X, Y, order));
}
BENCHMARK(BM_AdjointSeriesC1)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

void BM_Trajectory(benchmark::State& state) {
  const auto field = flow::ForceFieldNum::uniform({1.0, 0, 0}, {0, 0, 0.5});
  for (auto _ : state) {
    benchmark::DoNotOptimize(flow::integrate_trajectory(1.0, field, {0, 0, 0}, {0.1, 0, 0}, 5.0, 1e-3, 100));
  }
}
BENCHMARK(BM_Trajectory)->Unit(benchmark::kMillisecond);

// One transport step on the default 1D velocity grid.
void BM_TransportStep(benchmark::State& state) {
  const auto rep = algebra::Representation::Velocity;
  const auto g = flow::gaussian_state(rep, flow::default_axes(rep), {0.0, 0.0}, {1.0, 0.1});
  const auto field = flow::ForceFieldNum::uniform({1.0, 0, 0});
  for (auto _ : state) benchmark::DoNotOptimize(flow::evolve_state(g, 1.0, field, 0.05, 0.05));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_TransportStep)->Unit(benchmark::kMillisecond);

void BM_CompiledFieldTransportStep(benchmark::State& state) {
  const auto rep = algebra::Representation::Momentum;
  const auto g = flow::gaussian_state(rep, flow::default_axes(rep), {0.0, 0.0}, {1.0, 0.3});
  generators::ForceField f;
  f.phi = symbolic::x(1) * symbolic::x(1) / 2;
  const auto field = flow::ForceFieldNum::compile(f);
  for (auto _ : state) benchmark::DoNotOptimize(flow::evolve_state(g, 1.0, field, 0.05, 0.05));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_CompiledFieldTransportStep)->Unit(benchmark::kMillisecond);

void BM_BoostState(benchmark::State& state) {
  const auto rep = algebra::Representation::Velocity;
  const std::vector<flow::GridAxis> axes{{"v1", -0.999, 0.999, 201}, {"v3", -0.999, 0.999, 201}};
  const auto g = flow::gaussian_state(rep, axes, {0.3, 0.0}, {0.02, 0.02});
  for (auto _ : state) benchmark::DoNotOptimize(flow::boost_state(g, 3, 0.5493));
}
BENCHMARK(BM_BoostState)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
