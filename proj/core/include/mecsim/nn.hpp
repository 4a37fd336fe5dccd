#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mecsim/rng.hpp"

namespace mecsim {

// Fully-connected network shape: ReLU on hidden layers, linear output.
struct MlpSpec {
  int input_dim = 1;
  std::vector<int> hidden_dims{128, 256, 128, 64};
  int output_dim = 1;

  bool operator==(const MlpSpec&) const = default;
};

// One affine layer; w is row-major with shape out x in. Doubles throughout:
// the networks are tiny and bit-reproducibility matters more than speed.
struct Layer {
  int in = 0;
  int out = 0;
  std::vector<double> w;
  std::vector<double> b;

  bool operator==(const Layer&) const = default;
};

struct ParameterSet {
  MlpSpec spec;
  std::vector<Layer> layers;
  std::uint64_t init_seed = 0;

  // He-uniform weights (limit sqrt(6/fan_in)) drawn from the seed, zero
  // biases. The same seed always yields the same parameters.
  static ParameterSet init(const MlpSpec& spec, std::uint64_t seed);
  std::size_t count() const;

  bool operator==(const ParameterSet&) const = default;
};

// Post-activation values per layer, index 0 holding the input. Sufficient to
// run the backward pass (ReLU derivative recovers from its output).
struct ForwardCache {
  std::vector<std::vector<double>> acts;
};

std::vector<double> mlp_forward(const ParameterSet& params, const std::vector<double>& input,
                                ForwardCache* cache = nullptr);

// Parameter gradients, same shapes as the ParameterSet.
struct Gradients {
  std::vector<Layer> layers;

  static Gradients zeros_like(const ParameterSet& params);
};

// Exact reverse-mode gradients of the forward map, accumulated into accum so
// minibatches sum naturally.
void mlp_backward(const ParameterSet& params, const ForwardCache& cache,
                  const std::vector<double>& output_gradient, Gradients& accum);

Gradients mlp_backward(const ParameterSet& params, const ForwardCache& cache,
                       const std::vector<double>& output_gradient);

void scale_gradients(Gradients& grads, double factor);

// Bias-corrected Adam.
struct AdamState {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<Layer> m;
  std::vector<Layer> v;

  static AdamState init(const ParameterSet& params, double learning_rate);

  bool operator==(const AdamState&) const = default;
};

void adam_step(AdamState& state, ParameterSet& params, const Gradients& grads);

// Discrete distribution from logits. Masked entries carry a -infinity
// sentinel; they receive probability exactly 0 and are never sampled.
class Categorical {
public:
  static Categorical from_logits(const std::vector<double>& logits);

  const std::vector<double>& probs() const { return probs_; }
  double log_prob(int index) const;
  // -sum p log p with the 0*log(0) terms dropped.
  double entropy() const;
  int sample(Rng& rng) const;
  int argmax() const;

private:
  std::vector<double> probs_;
  std::vector<double> log_probs_;
};

// Copies logits with infeasible entries (mask value 0) replaced by -infinity.
std::vector<double> masked_logits(const std::vector<double>& logits,
                                  const std::vector<std::uint8_t>& mask);

// Checkpoint document: {"spec", "layers" (row-major weights), "adam" or
// null, "init_seed"}; the field order is normative.
struct NetCheckpoint {
  ParameterSet params;
  std::optional<AdamState> adam;

  bool operator==(const NetCheckpoint&) const = default;
};

std::string checkpoint_to_string(const NetCheckpoint& ckpt);
NetCheckpoint checkpoint_from_string(const std::string& text);

}  // namespace mecsim
