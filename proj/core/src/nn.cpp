#include "mecsim/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nn_json.hpp"

namespace mecsim {

namespace {

std::vector<int> layer_dims(const MlpSpec& spec) {
  if (spec.input_dim < 1 || spec.output_dim < 1) {
    throw std::invalid_argument("MlpSpec: dimensions must be at least 1");
  }
  for (int h : spec.hidden_dims) {
    if (h < 1) {
      throw std::invalid_argument("MlpSpec: dimensions must be at least 1");
    }
  }
  std::vector<int> dims;
  dims.reserve(spec.hidden_dims.size() + 2);
  dims.push_back(spec.input_dim);
  dims.insert(dims.end(), spec.hidden_dims.begin(), spec.hidden_dims.end());
  dims.push_back(spec.output_dim);
  return dims;
}

std::vector<Layer> zero_layers(const MlpSpec& spec) {
  const auto dims = layer_dims(spec);
  std::vector<Layer> layers(dims.size() - 1);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    layers[l].in = dims[l];
    layers[l].out = dims[l + 1];
    layers[l].w.assign(static_cast<std::size_t>(dims[l]) * dims[l + 1], 0.0);
    layers[l].b.assign(static_cast<std::size_t>(dims[l + 1]), 0.0);
  }
  return layers;
}

void check_same_shape(const std::vector<Layer>& a, const std::vector<Layer>& b,
                      const char* what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": layer count mismatch");
  }
  for (std::size_t l = 0; l < a.size(); ++l) {
    if (a[l].in != b[l].in || a[l].out != b[l].out || a[l].w.size() != b[l].w.size() ||
        a[l].b.size() != b[l].b.size()) {
      throw std::invalid_argument(std::string(what) + ": layer shape mismatch");
    }
  }
}

}  // namespace

ParameterSet ParameterSet::init(const MlpSpec& spec, std::uint64_t seed) {
  ParameterSet p;
  p.spec = spec;
  p.init_seed = seed;
  p.layers = zero_layers(spec);
  Rng rng(seed);
  for (auto& layer : p.layers) {
    const double limit = std::sqrt(6.0 / layer.in);
    for (auto& w : layer.w) {
      w = rng.uniform(-limit, limit);
    }
  }
  return p;
}

std::size_t ParameterSet::count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) {
    n += layer.w.size() + layer.b.size();
  }
  return n;
}

std::vector<double> mlp_forward(const ParameterSet& params, const std::vector<double>& input,
                                ForwardCache* cache) {
  if (params.layers.empty()) {
    throw std::invalid_argument("mlp_forward: uninitialized parameters");
  }
  if (static_cast<int>(input.size()) != params.layers.front().in) {
    throw std::invalid_argument("mlp_forward: input dimension mismatch");
  }
  if (cache) {
    cache->acts.assign(params.layers.size() + 1, {});
    cache->acts[0] = input;
  }
  std::vector<double> act = input;
  std::vector<double> next;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const Layer& layer = params.layers[l];
    const bool is_output = l + 1 == params.layers.size();
    next.assign(static_cast<std::size_t>(layer.out), 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
      double z = layer.b[static_cast<std::size_t>(o)];
      for (int i = 0; i < layer.in; ++i) {
        z += row[i] * act[static_cast<std::size_t>(i)];
      }
      next[static_cast<std::size_t>(o)] = is_output ? z : std::max(0.0, z);
    }
    act.swap(next);
    if (cache) {
      cache->acts[l + 1] = act;
    }
  }
  return act;
}

Gradients Gradients::zeros_like(const ParameterSet& params) {
  Gradients g;
  g.layers = zero_layers(params.spec);
  return g;
}

void mlp_backward(const ParameterSet& params, const ForwardCache& cache,
                  const std::vector<double>& output_gradient, Gradients& accum) {
  const std::size_t n_layers = params.layers.size();
  if (cache.acts.size() != n_layers + 1) {
    throw std::invalid_argument("mlp_backward: cache does not match the parameter set");
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    if (cache.acts[l].size() != static_cast<std::size_t>(params.layers[l].in)) {
      throw std::invalid_argument("mlp_backward: cache does not match the parameter set");
    }
  }
  if (output_gradient.size() != static_cast<std::size_t>(params.layers.back().out)) {
    throw std::invalid_argument("mlp_backward: output gradient dimension mismatch");
  }
  check_same_shape(params.layers, accum.layers, "mlp_backward");

  std::vector<double> delta = output_gradient;
  std::vector<double> prev;
  for (std::size_t l = n_layers; l-- > 0;) {
    const Layer& layer = params.layers[l];
    Layer& grad = accum.layers[l];
    const std::vector<double>& in_act = cache.acts[l];
    for (int o = 0; o < layer.out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      grad.b[static_cast<std::size_t>(o)] += d;
      double* grow = grad.w.data() + static_cast<std::size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) {
        grow[i] += d * in_act[static_cast<std::size_t>(i)];
      }
    }
    if (l == 0) {
      break;
    }
    prev.assign(static_cast<std::size_t>(layer.in), 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) {
        prev[static_cast<std::size_t>(i)] += d * row[i];
      }
    }
    // ReLU derivative from the post-activation value of the layer below.
    for (int i = 0; i < layer.in; ++i) {
      if (cache.acts[l][static_cast<std::size_t>(i)] <= 0.0) {
        prev[static_cast<std::size_t>(i)] = 0.0;
      }
    }
    delta.swap(prev);
  }
}

Gradients mlp_backward(const ParameterSet& params, const ForwardCache& cache,
                       const std::vector<double>& output_gradient) {
  Gradients g = Gradients::zeros_like(params);
  mlp_backward(params, cache, output_gradient, g);
  return g;
}

void scale_gradients(Gradients& grads, double factor) {
  for (auto& layer : grads.layers) {
    for (auto& w : layer.w) {
      w *= factor;
    }
    for (auto& b : layer.b) {
      b *= factor;
    }
  }
}

AdamState AdamState::init(const ParameterSet& params, double learning_rate) {
  AdamState s;
  s.learning_rate = learning_rate;
  s.m = zero_layers(params.spec);
  s.v = zero_layers(params.spec);
  return s;
}

void adam_step(AdamState& state, ParameterSet& params, const Gradients& grads) {
  check_same_shape(params.layers, grads.layers, "adam_step");
  check_same_shape(params.layers, state.m, "adam_step");
  state.step += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto update = [&](std::vector<double>& p, std::vector<double>& m, std::vector<double>& v,
                      const std::vector<double>& g) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
        v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
        const double m_hat = m[i] / c1;
        const double v_hat = v[i] / c2;
        p[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
      }
    };
    update(params.layers[l].w, state.m[l].w, state.v[l].w, grads.layers[l].w);
    update(params.layers[l].b, state.m[l].b, state.v[l].b, grads.layers[l].b);
  }
}

Categorical Categorical::from_logits(const std::vector<double>& logits) {
  if (logits.empty()) {
    throw std::invalid_argument("Categorical: empty logits");
  }
  double max_logit = -std::numeric_limits<double>::infinity();
  for (double z : logits) {
    if (std::isnan(z) || z == std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("Categorical: logits must be finite or -infinity");
    }
    max_logit = std::max(max_logit, z);
  }
  if (max_logit == -std::numeric_limits<double>::infinity()) {
    throw std::invalid_argument("Categorical: all actions masked");
  }
  Categorical c;
  c.probs_.resize(logits.size());
  c.log_probs_.resize(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double shifted = logits[i] - max_logit;
    c.log_probs_[i] = shifted;
    c.probs_[i] = std::exp(shifted);  // exp(-inf) == 0 exactly
    sum += c.probs_[i];
  }
  const double log_sum = std::log(sum);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    c.probs_[i] /= sum;
    c.log_probs_[i] -= log_sum;
  }
  return c;
}

double Categorical::log_prob(int index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= log_probs_.size()) {
    throw std::out_of_range("Categorical::log_prob: index out of range");
  }
  return log_probs_[static_cast<std::size_t>(index)];
}

double Categorical::entropy() const {
  double h = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (probs_[i] > 0.0) {
      h -= probs_[i] * log_probs_[i];
    }
  }
  return h;
}

int Categorical::sample(Rng& rng) const {
  const double u = rng.uniform();
  double cum = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (probs_[i] <= 0.0) {
      continue;
    }
    last_positive = static_cast<int>(i);
    cum += probs_[i];
    if (u < cum) {
      return static_cast<int>(i);
    }
  }
  return last_positive;  // rounding left a sliver above cum; take the last support point
}

int Categorical::argmax() const {
  int best = 0;
  for (std::size_t i = 1; i < probs_.size(); ++i) {
    if (probs_[i] > probs_[static_cast<std::size_t>(best)]) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<double> masked_logits(const std::vector<double>& logits,
                                  const std::vector<std::uint8_t>& mask) {
  if (logits.size() != mask.size()) {
    throw std::invalid_argument("masked_logits: size mismatch");
  }
  std::vector<double> out = logits;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!mask[i]) {
      out[i] = -std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

namespace detail {

ordered_json layer_values_to_json(const Layer& layer) {
  ordered_json j;
  j["w"] = layer.w;
  j["b"] = layer.b;
  return j;
}

Layer layer_values_from_json(const ordered_json& j, int in, int out, const char* what) {
  Layer layer;
  layer.in = in;
  layer.out = out;
  layer.w = j.at("w").get<std::vector<double>>();
  layer.b = j.at("b").get<std::vector<double>>();
  if (layer.w.size() != static_cast<std::size_t>(in) * static_cast<std::size_t>(out) ||
      layer.b.size() != static_cast<std::size_t>(out)) {
    throw std::invalid_argument(std::string(what) + ": layer shape mismatch");
  }
  return layer;
}

ordered_json net_checkpoint_to_json(const NetCheckpoint& ckpt) {
  ordered_json j;
  j["spec"] = {{"input_dim", ckpt.params.spec.input_dim},
               {"hidden_dims", ckpt.params.spec.hidden_dims},
               {"output_dim", ckpt.params.spec.output_dim}};
  ordered_json layers = ordered_json::array();
  for (const auto& layer : ckpt.params.layers) {
    layers.push_back(layer_values_to_json(layer));
  }
  j["layers"] = layers;
  if (ckpt.adam) {
    ordered_json a;
    a["learning_rate"] = ckpt.adam->learning_rate;
    a["beta1"] = ckpt.adam->beta1;
    a["beta2"] = ckpt.adam->beta2;
    a["epsilon"] = ckpt.adam->epsilon;
    a["step"] = ckpt.adam->step;
    ordered_json m = ordered_json::array();
    ordered_json v = ordered_json::array();
    for (std::size_t l = 0; l < ckpt.adam->m.size(); ++l) {
      m.push_back(layer_values_to_json(ckpt.adam->m[l]));
      v.push_back(layer_values_to_json(ckpt.adam->v[l]));
    }
    a["m"] = m;
    a["v"] = v;
    j["adam"] = a;
  } else {
    j["adam"] = nullptr;
  }
  j["init_seed"] = ckpt.params.init_seed;
  return j;
}

NetCheckpoint net_checkpoint_from_json(const ordered_json& j) {
  NetCheckpoint ckpt;
  const auto& spec = j.at("spec");
  ckpt.params.spec.input_dim = spec.at("input_dim").get<int>();
  ckpt.params.spec.hidden_dims = spec.at("hidden_dims").get<std::vector<int>>();
  ckpt.params.spec.output_dim = spec.at("output_dim").get<int>();

  const std::vector<Layer> shape_ref = zero_layers(ckpt.params.spec);

  const auto& layers = j.at("layers");
  if (layers.size() != shape_ref.size()) {
    throw std::invalid_argument("checkpoint: layer count does not match spec");
  }
  ckpt.params.layers.clear();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    ckpt.params.layers.push_back(
        layer_values_from_json(layers[l], shape_ref[l].in, shape_ref[l].out, "checkpoint"));
  }
  const auto& adam = j.at("adam");
  if (!adam.is_null()) {
    AdamState s;
    s.learning_rate = adam.at("learning_rate").get<double>();
    s.beta1 = adam.at("beta1").get<double>();
    s.beta2 = adam.at("beta2").get<double>();
    s.epsilon = adam.at("epsilon").get<double>();
    s.step = adam.at("step").get<std::int64_t>();
    const auto& m = adam.at("m");
    const auto& v = adam.at("v");
    if (m.size() != shape_ref.size() || v.size() != shape_ref.size()) {
      throw std::invalid_argument("checkpoint: adam state does not match spec");
    }
    for (std::size_t l = 0; l < shape_ref.size(); ++l) {
      s.m.push_back(
          layer_values_from_json(m[l], shape_ref[l].in, shape_ref[l].out, "checkpoint adam"));
      s.v.push_back(
          layer_values_from_json(v[l], shape_ref[l].in, shape_ref[l].out, "checkpoint adam"));
    }
    ckpt.adam = std::move(s);
  }
  ckpt.params.init_seed = j.at("init_seed").get<std::uint64_t>();
  return ckpt;
}

}  // namespace detail

std::string checkpoint_to_string(const NetCheckpoint& ckpt) {
  return detail::net_checkpoint_to_json(ckpt).dump();
}

NetCheckpoint checkpoint_from_string(const std::string& text) {
  return detail::net_checkpoint_from_json(detail::ordered_json::parse(text));
}

}  // namespace mecsim
