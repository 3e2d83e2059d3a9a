#include <benchmark/benchmark.h>

#include "normsim/harness.hpp"
#include "normsim/reasoning.hpp"

using namespace normsim;

namespace {

SimulationRun warmed_run(Strategy strategy) {
  ScenarioConfig config = ScenarioConfig::scenario('a');
  config.strategy = strategy;
  SimulationRun sim(config, 7);
  for (int step = 0; step < 200; ++step) sim.step_once();
  return sim;
}

void BM_StepOnceUns(benchmark::State& state) {
  SimulationRun sim = warmed_run(Strategy::Uns);
  for (auto _ : state) sim.step_once();
}
BENCHMARK(BM_StepOnceUns);

void BM_StepOnceIron(benchmark::State& state) {
  SimulationRun sim = warmed_run(Strategy::Iron);
  for (auto _ : state) sim.step_once();
}
BENCHMARK(BM_StepOnceIron);

WorldState busy_world(std::vector<int>& ids) {
  WorldState world(RoadMap::standard());
  for (int i = 0; i < 8; ++i) {
    ids.push_back(world
                      .place_vehicle(VehicleKind::Ordinary, {9, 1 + i},
                                     Heading::East, {9, 18})
                      .id);
    ids.push_back(world
                      .place_vehicle(VehicleKind::Ordinary, {1 + i, 9},
                                     Heading::South, {18, 9})
                      .id);
  }
  return world;
}

void BM_AccumulatedUtility(benchmark::State& state) {
  std::vector<int> ids;
  WorldState world = busy_world(ids);
  NormSet norms;
  int wild = norms.add(Precondition{{}, {}, {}}, 0).id;
  UtilityFunction utility = build_traffic_utility();
  int head = ids.front();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        accumulated_utility(world, utility, norms, head, wild));
}
BENCHMARK(BM_AccumulatedUtility);

void BM_ResolveUnmatchable(benchmark::State& state) {
  std::vector<int> ids;
  WorldState world = busy_world(ids);
  NormSet norms;
  norms.add(Precondition{{}, {}, {}}, 0);
  UtilityFunction utility = build_traffic_utility();
  for (auto _ : state)
    benchmark::DoNotOptimize(resolve_unmatchable(world, norms, utility));
}
BENCHMARK(BM_ResolveUnmatchable);

void BM_LocalViews(benchmark::State& state) {
  std::vector<int> ids;
  WorldState world = busy_world(ids);
  for (auto _ : state)
    for (int id : ids) benchmark::DoNotOptimize(world.local_view(id));
}
BENCHMARK(BM_LocalViews);

}  // namespace

BENCHMARK_MAIN();
