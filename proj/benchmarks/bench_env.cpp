#include <benchmark/benchmark.h>

#include "mecsim/agents.hpp"
#include "mecsim/env_model.hpp"
#include "mecsim/episode.hpp"
#include "mecsim/rng.hpp"

using namespace mecsim;

namespace {

Task urllc_task() {
  Task task;
  task.bytes = 3e6;
  task.cycles = 4e8;
  task.deadline = 0.7;
  task.slice = SliceId::Urllc;
  return task;
}

UserEquipment mid_cell_ue() {
  UserEquipment ue;
  ue.distance = 900.0;
  ue.local_cpu_freq = 6e8;
  ue.tx_power = 0.2;
  ue.local_process_power = 0.4;
  return ue;
}

void BM_ChannelCapacity(benchmark::State& state) {
  const EnvConfig env;
  const UserEquipment ue = mid_cell_ue();
  for (auto _ : state) {
    benchmark::DoNotOptimize(channel_capacity(8, env.radio, ue));
  }
}
BENCHMARK(BM_ChannelCapacity);

void BM_ExecutionOutcome(benchmark::State& state) {
  const EnvConfig env;
  const Task task = urllc_task();
  const UserEquipment ue = mid_cell_ue();
  const AllocationDecision decision = make_decision(8, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(execution_outcome(task, ue, env.radio, env.mec, decision));
  }
}
BENCHMARK(BM_ExecutionOutcome);

void BM_SampleArrivals(benchmark::State& state) {
  const EnvConfig env;
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_arrivals(rng, env));
  }
}
BENCHMARK(BM_SampleArrivals);

void BM_FeasibleMask(benchmark::State& state) {
  const EnvConfig env;
  ResourcePools pools = make_pools(80, 40);
  pools.comm_remaining = 13;
  pools.comp_remaining = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(feasible_action_mask(env.menu, pools));
  }
}
BENCHMARK(BM_FeasibleMask);

void BM_EpisodeSequential(benchmark::State& state) {
  const EnvConfig env;
  SequentialBaseline policy;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_episode(policy, seed++, env));
  }
}
BENCHMARK(BM_EpisodeSequential);

void BM_EpisodeRandom(benchmark::State& state) {
  const EnvConfig env;
  RandomPolicy policy;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_episode(policy, seed++, env));
  }
}
BENCHMARK(BM_EpisodeRandom);

}  // namespace

BENCHMARK_MAIN();
