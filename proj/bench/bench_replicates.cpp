// Parallel replicate fan-out vs the serial reference on the two main kernels.
#include <benchmark/benchmark.h>

#include "lwf/discrete_model.hpp"
#include "lwf/replicate.hpp"
#include "lwf/sde.hpp"

namespace {

using namespace lwf;

const SimplexPoint& start() {
  static const SimplexPoint x0({0.2, 0.3, 0.5});
  return x0;
}

const SdeIntegrator& sde() {
  static const SdeIntegrator s(SdeConfig{DriftFunction(3, drifts::Rps{1.0}), 1.0, LambdaMeasure::point_mass(0.3, 1.0),
                                         1e-3, 1e-3, 0.5, 0.0});
  return s;
}

const DiscreteModel& discrete() {
  static const DiscreteModel m(make_schedule(2000, 0.25, 1.0, 1.0, LambdaMeasure::zero(), make_tail({{2, 1.0}})),
                               ColouringRule::transitive(3));
  return m;
}

auto sde_kernel = [](std::size_t i) {
  static const std::vector<double> at{0.5};
  RngStream rng(7, i);
  return sde_states_at(sde(), start(), at, rng).back()[0];
};

auto discrete_kernel = [](std::size_t i) {
  RngStream rng(11, i);
  return run_discrete(discrete(), start(), 200, rng)[0];
};

void BM_SdeSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_replicates_serial(static_cast<std::size_t>(state.range(0)), sde_kernel));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SdeParallel(benchmark::State& state) {
  const Execution ex{static_cast<int>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(run_replicates(static_cast<std::size_t>(state.range(0)), sde_kernel, ex));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DiscreteSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_replicates_serial(static_cast<std::size_t>(state.range(0)), discrete_kernel));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DiscreteParallel(benchmark::State& state) {
  const Execution ex{static_cast<int>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(run_replicates(static_cast<std::size_t>(state.range(0)), discrete_kernel, ex));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_SdeSerial)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SdeParallel)->Args({64, 1})->Args({64, 2})->Args({64, 4})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DiscreteSerial)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DiscreteParallel)->Args({64, 1})->Args({64, 2})->Args({64, 4})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
