// Serial vs OpenMP radio map construction on the default deployment.
#include <benchmark/benchmark.h>

#include "uavplan/radio_map.hpp"
#include "uavplan/scenario.hpp"

namespace {

const uavplan::Scenario& scenario() {
  static const uavplan::Scenario s = [] {
    uavplan::DeploymentParams p;
    p.altitude = 80.0;
    return uavplan::generate_scenario(7, p);
  }();
  return s;
}

void BM_RadioMapSerial(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(uavplan::radio::build_radio_map_serial(scenario(), m));
  }
  state.SetItemsProcessed(state.iterations() * scenario().grid.num_points());
}

void BM_RadioMapParallel(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(uavplan::radio::build_radio_map(scenario(), m));
  }
  state.SetItemsProcessed(state.iterations() * scenario().grid.num_points());
}

}  // namespace

BENCHMARK(BM_RadioMapSerial)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RadioMapParallel)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
