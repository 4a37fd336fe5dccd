#include <benchmark/benchmark.h>

#include <vector>

#include "mecsim/nn.hpp"
#include "mecsim/rng.hpp"

using namespace mecsim;

namespace {

MlpSpec policy_spec() {
  MlpSpec spec;
  spec.input_dim = 9;
  spec.output_dim = 36;
  return spec;  // default hidden stack 128-256-128-64
}

std::vector<double> random_input(int dim, Rng& rng) {
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (double& v : x) {
    v = rng.uniform();
  }
  return x;
}

void BM_MlpForward(benchmark::State& state) {
  const ParameterSet params = ParameterSet::init(policy_spec(), 1);
  Rng rng(2);
  const std::vector<double> x = random_input(9, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mlp_forward(params, x));
  }
}
BENCHMARK(BM_MlpForward);

void BM_MlpBackward(benchmark::State& state) {
  const ParameterSet params = ParameterSet::init(policy_spec(), 1);
  Rng rng(2);
  const std::vector<double> x = random_input(9, rng);
  ForwardCache cache;
  mlp_forward(params, x, &cache);
  const std::vector<double> upstream(36, 1.0);
  Gradients grads = Gradients::zeros_like(params);
  for (auto _ : state) {
    mlp_backward(params, cache, upstream, grads);
    benchmark::DoNotOptimize(grads);
  }
}
BENCHMARK(BM_MlpBackward);

void BM_AdamStep(benchmark::State& state) {
  ParameterSet params = ParameterSet::init(policy_spec(), 1);
  AdamState adam = AdamState::init(params, 1e-4);
  Rng rng(2);
  const std::vector<double> x = random_input(9, rng);
  ForwardCache cache;
  mlp_forward(params, x, &cache);
  const std::vector<double> upstream(36, 1.0);
  const Gradients grads = mlp_backward(params, cache, upstream);
  for (auto _ : state) {
    adam_step(adam, params, grads);
    benchmark::DoNotOptimize(params);
  }
}
BENCHMARK(BM_AdamStep);

void BM_CategoricalSample(benchmark::State& state) {
  Rng rng(3);
  std::vector<double> logits(36);
  for (double& v : logits) {
    v = rng.uniform(-2.0, 2.0);
  }
  const Categorical dist = Categorical::from_logits(logits);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dist.sample(rng));
  }
}
BENCHMARK(BM_CategoricalSample);

}  // namespace

BENCHMARK_MAIN();
