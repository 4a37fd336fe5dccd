#include "mecsim/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "nn_json.hpp"

namespace mecsim {

namespace {

std::vector<double> to_vec(const Observation& obs) {
  return std::vector<double>(obs.begin(), obs.end());
}

int menu_index_of(const ActionMenu& menu, int k_comm, int k_comp) {
  for (std::size_t ic = 0; ic < menu.comm_options.size(); ++ic) {
    if (menu.comm_options[ic] != k_comm) {
      continue;
    }
    for (std::size_t ip = 0; ip < menu.comp_options.size(); ++ip) {
      if (menu.comp_options[ip] == k_comp) {
        return static_cast<int>(ic * menu.comp_options.size() + ip);
      }
    }
  }
  throw std::logic_error("menu_index_of: pair not in menu");
}

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::swap(idx[i - 1], idx[rng.uniform_index(i)]);
  }
}

detail::ordered_json ppo_config_to_json(const PpoConfig& c) {
  detail::ordered_json j;
  j["clip_epsilon"] = c.clip_epsilon;
  j["gae_lambda"] = c.gae_lambda;
  j["epochs_per_update"] = c.epochs_per_update;
  j["episodes_per_rollout"] = c.episodes_per_rollout;
  j["batch_size"] = c.batch_size;
  j["value_loss_coeff"] = c.value_loss_coeff;
  j["entropy_coeff"] = c.entropy_coeff;
  j["learning_rate"] = c.learning_rate;
  j["discount"] = c.discount;
  j["hidden_dims"] = c.hidden_dims;
  return j;
}

PpoConfig ppo_config_from_json(const detail::ordered_json& j) {
  PpoConfig c;
  c.clip_epsilon = j.at("clip_epsilon").get<double>();
  c.gae_lambda = j.at("gae_lambda").get<double>();
  c.epochs_per_update = j.at("epochs_per_update").get<int>();
  c.episodes_per_rollout = j.at("episodes_per_rollout").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.value_loss_coeff = j.at("value_loss_coeff").get<double>();
  c.entropy_coeff = j.at("entropy_coeff").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.discount = j.at("discount").get<double>();
  c.hidden_dims = j.at("hidden_dims").get<std::vector<int>>();
  return c;
}

detail::ordered_json dqn_config_to_json(const DqnConfig& c) {
  detail::ordered_json j;
  j["replay_capacity"] = c.replay_capacity;
  j["target_sync_interval"] = c.target_sync_interval;
  j["epsilon_start"] = c.epsilon_start;
  j["epsilon_end"] = c.epsilon_end;
  j["epsilon_decay_episodes"] = c.epsilon_decay_episodes;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["discount"] = c.discount;
  j["hidden_dims"] = c.hidden_dims;
  return j;
}

DqnConfig dqn_config_from_json(const detail::ordered_json& j) {
  DqnConfig c;
  c.replay_capacity = j.at("replay_capacity").get<int>();
  c.target_sync_interval = j.at("target_sync_interval").get<int>();
  c.epsilon_start = j.at("epsilon_start").get<double>();
  c.epsilon_end = j.at("epsilon_end").get<double>();
  c.epsilon_decay_episodes = j.at("epsilon_decay_episodes").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.discount = j.at("discount").get<double>();
  c.hidden_dims = j.at("hidden_dims").get<std::vector<int>>();
  return c;
}

}  // namespace

void RolloutBuffer::clear() {
  obs.clear();
  masks.clear();
  actions.clear();
  log_probs.clear();
  rewards.clear();
  values.clear();
  dones.clear();
}

GaeResult compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                      const std::vector<std::uint8_t>& dones, double discount,
                      double gae_lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) {
    throw std::invalid_argument("compute_gae: input lengths differ");
  }
  GaeResult res;
  res.advantages.resize(n);
  res.returns.resize(n);
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double not_done = dones[i] ? 0.0 : 1.0;
    const double next_value = (i + 1 < n) ? values[i + 1] : 0.0;
    const double delta = rewards[i] + discount * not_done * next_value - values[i];
    running = delta + discount * gae_lambda * not_done * running;
    res.advantages[i] = running;
    res.returns[i] = running + values[i];
  }
  return res;
}

double clipped_surrogate(double ratio, double advantage, double clip_epsilon) {
  const double clipped_ratio = std::clamp(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
  return std::min(ratio * advantage, clipped_ratio * advantage);
}

PpoAgent::PpoAgent(const PpoConfig& cfg, int obs_dim, int n_actions, std::uint64_t seed)
    : cfg_(cfg),
      actor_(ParameterSet::init({obs_dim, cfg.hidden_dims, n_actions}, derive_seed(seed, 0))),
      critic_(ParameterSet::init({obs_dim, cfg.hidden_dims, 1}, derive_seed(seed, 1))),
      actor_adam_(AdamState::init(actor_, cfg.learning_rate)),
      critic_adam_(AdamState::init(critic_, cfg.learning_rate)) {}

int PpoAgent::act(const StepContext& ctx, Rng& rng) {
  (void)rng;
  const auto logits = mlp_forward(actor_, to_vec(ctx.obs));
  const auto cat = Categorical::from_logits(masked_logits(logits, ctx.mask));
  return cat.argmax();
}

int PpoAgent::sample_action(const Observation& obs, const ActionMask& mask, Rng& rng,
                            double* log_prob, double* value) {
  const auto logits = mlp_forward(actor_, to_vec(obs));
  const auto cat = Categorical::from_logits(masked_logits(logits, mask));
  const int action = cat.sample(rng);
  if (log_prob) {
    *log_prob = cat.log_prob(action);
  }
  if (value) {
    *value = mlp_forward(critic_, to_vec(obs))[0];
  }
  return action;
}

namespace {

// Policy shim that routes run_episode's per-task decisions through the
// agent's sampler while recording the transition context.
class RecordingShim : public Policy {
public:
  RecordingShim(PpoAgent& agent, RolloutBuffer& buf) : agent_(agent), buf_(buf) {}

  int act(const StepContext& ctx, Rng& rng) override {
    double log_prob = 0.0;
    double value = 0.0;
    const int action = agent_.sample_action(ctx.obs, ctx.mask, rng, &log_prob, &value);
    buf_.obs.push_back(ctx.obs);
    buf_.masks.push_back(ctx.mask);
    buf_.actions.push_back(action);
    buf_.log_probs.push_back(log_prob);
    buf_.values.push_back(value);
    buf_.rewards.push_back(0.0);  // filled from the trace after the episode
    buf_.dones.push_back(0);
    return action;
  }

  bool deterministic() const override { return false; }

private:
  PpoAgent& agent_;
  RolloutBuffer& buf_;
};

}  // namespace

void PpoAgent::collect_rollouts(const EnvConfig& env, std::uint64_t master_seed,
                                int first_episode_index, int n_episodes, RolloutBuffer& buf,
                                const EpisodeCallback& on_episode) {
  if (n_episodes < 0) {
    throw std::invalid_argument("PpoAgent::collect_rollouts: negative episode count");
  }
  RecordingShim shim(*this, buf);
  for (int e = 0; e < n_episodes; ++e) {
    const int episode_index = first_episode_index + e;
    const std::size_t start = buf.size();
    const EpisodeTrace trace =
        run_episode(shim, derive_seed(master_seed, static_cast<std::uint64_t>(episode_index)), env);
    EpisodeStats stats;
    stats.steps = static_cast<int>(trace.steps.size());
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
      buf.rewards[start + i] = trace.steps[i].reward;
      stats.reward_sum += trace.steps[i].reward;
    }
    if (!trace.steps.empty()) {
      buf.dones.back() = 1;
    }
    if (on_episode) {
      on_episode(episode_index, stats);
    }
  }
}

PpoLossStats PpoAgent::update(const RolloutBuffer& buf, Rng& rng) {
  const std::size_t n = buf.size();
  if (n == 0) {
    throw std::invalid_argument("PpoAgent::update: empty rollout buffer");
  }
  const GaeResult gae =
      compute_gae(buf.rewards, buf.values, buf.dones, cfg_.discount, cfg_.gae_lambda);

  double mean = 0.0;
  for (double a : gae.advantages) {
    mean += a;
  }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double a : gae.advantages) {
    var += (a - mean) * (a - mean);
  }
  var /= static_cast<double>(n);
  const double inv_std = 1.0 / (std::sqrt(var) + 1e-8);
  std::vector<double> advantages(n);
  for (std::size_t i = 0; i < n; ++i) {
    advantages[i] = (gae.advantages[i] - mean) * inv_std;
  }

  PpoLossStats stats;
  double policy_loss_sum = 0.0;
  double value_loss_sum = 0.0;
  double entropy_sum = 0.0;
  std::size_t clipped_count = 0;
  std::size_t sample_count = 0;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    order[i] = i;
  }

  ForwardCache actor_cache;
  ForwardCache critic_cache;
  std::vector<double> dlogits(static_cast<std::size_t>(actor_.spec.output_dim));
  for (int epoch = 0; epoch < cfg_.epochs_per_update; ++epoch) {
    shuffle_indices(order, rng);
    for (std::size_t batch_start = 0; batch_start < n;
         batch_start += static_cast<std::size_t>(cfg_.batch_size)) {
      const std::size_t batch_end =
          std::min(n, batch_start + static_cast<std::size_t>(cfg_.batch_size));
      const double inv_batch = 1.0 / static_cast<double>(batch_end - batch_start);

      Gradients actor_grads = Gradients::zeros_like(actor_);
      Gradients critic_grads = Gradients::zeros_like(critic_);

      for (std::size_t bi = batch_start; bi < batch_end; ++bi) {
        const std::size_t idx = order[bi];
        const auto input = to_vec(buf.obs[idx]);

        const auto logits = mlp_forward(actor_, input, &actor_cache);
        const auto cat = Categorical::from_logits(masked_logits(logits, buf.masks[idx]));
        const int action = buf.actions[idx];
        const double log_prob_new = cat.log_prob(action);
        const double ratio = std::exp(log_prob_new - buf.log_probs[idx]);
        const double adv = advantages[idx];

        const double unclipped = ratio * adv;
        const double clipped =
            std::clamp(ratio, 1.0 - cfg_.clip_epsilon, 1.0 + cfg_.clip_epsilon) * adv;
        const bool use_unclipped = unclipped <= clipped;
        const double surrogate = use_unclipped ? unclipped : clipped;
        const double entropy = cat.entropy();
        const auto& probs = cat.probs();

        // d(-surrogate - entropy_coeff*H)/dlogits, averaged over the batch.
        const double g_surr = use_unclipped ? unclipped : 0.0;  // ratio*adv through log_prob
        for (std::size_t k = 0; k < probs.size(); ++k) {
          if (probs[k] <= 0.0) {
            dlogits[k] = 0.0;
            continue;
          }
          const double indicator = static_cast<int>(k) == action ? 1.0 : 0.0;
          const double d_policy = -g_surr * (indicator - probs[k]);
          const double d_entropy =
              cfg_.entropy_coeff * probs[k] * (std::log(probs[k]) + entropy);
          dlogits[k] = (d_policy + d_entropy) * inv_batch;
        }
        mlp_backward(actor_, actor_cache, dlogits, actor_grads);

        const double value = mlp_forward(critic_, input, &critic_cache)[0];
        const double value_err = value - gae.returns[idx];
        mlp_backward(critic_, critic_cache,
                     {cfg_.value_loss_coeff * 2.0 * value_err * inv_batch}, critic_grads);

        policy_loss_sum += -surrogate;
        value_loss_sum += value_err * value_err;
        entropy_sum += entropy;
        clipped_count += use_unclipped ? 0 : 1;
        ++sample_count;
      }

      adam_step(actor_adam_, actor_, actor_grads);
      adam_step(critic_adam_, critic_, critic_grads);
      ++stats.minibatches;
    }
  }

  stats.policy_loss = policy_loss_sum / static_cast<double>(sample_count);
  stats.value_loss = value_loss_sum / static_cast<double>(sample_count);
  stats.entropy = entropy_sum / static_cast<double>(sample_count);
  stats.clip_fraction = static_cast<double>(clipped_count) / static_cast<double>(sample_count);
  if (!std::isfinite(stats.policy_loss) || !std::isfinite(stats.value_loss) ||
      !std::isfinite(stats.entropy)) {
    throw std::runtime_error(
        "PpoAgent::update: non-finite loss (policy=" + std::to_string(stats.policy_loss) +
        ", value=" + std::to_string(stats.value_loss) +
        ", entropy=" + std::to_string(stats.entropy) + ")");
  }
  return stats;
}

std::string PpoAgent::checkpoint_string() const {
  detail::ordered_json j;
  j["kind"] = "ppo";
  j["config"] = ppo_config_to_json(cfg_);
  j["actor"] = detail::net_checkpoint_to_json({actor_, actor_adam_});
  j["critic"] = detail::net_checkpoint_to_json({critic_, critic_adam_});
  return j.dump();
}

std::unique_ptr<PpoAgent> PpoAgent::from_checkpoint_string(const std::string& text) {
  const auto j = detail::ordered_json::parse(text);
  if (j.at("kind").get<std::string>() != "ppo") {
    throw std::invalid_argument("PpoAgent: checkpoint kind is not \"ppo\"");
  }
  const PpoConfig cfg = ppo_config_from_json(j.at("config"));
  NetCheckpoint actor = detail::net_checkpoint_from_json(j.at("actor"));
  NetCheckpoint critic = detail::net_checkpoint_from_json(j.at("critic"));
  if (!actor.adam || !critic.adam) {
    throw std::invalid_argument("PpoAgent: checkpoint is missing optimizer state");
  }
  auto agent = std::make_unique<PpoAgent>(cfg, actor.params.spec.input_dim,
                                          actor.params.spec.output_dim, actor.params.init_seed);
  agent->actor_ = std::move(actor.params);
  agent->critic_ = std::move(critic.params);
  agent->actor_adam_ = std::move(*actor.adam);
  agent->critic_adam_ = std::move(*critic.adam);
  return agent;
}

int dqn_act(const ParameterSet& q_net, const Observation& obs, const ActionMask& mask,
            double epsilon, Rng& rng) {
  std::vector<int> feasible;
  feasible.reserve(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) {
      feasible.push_back(static_cast<int>(i));
    }
  }
  if (feasible.empty()) {
    throw std::invalid_argument("dqn_act: no feasible action");
  }
  if (epsilon > 0.0 && rng.uniform() < epsilon) {
    return feasible[rng.uniform_index(feasible.size())];
  }
  const auto q = mlp_forward(q_net, to_vec(obs));
  int best = feasible.front();
  for (int idx : feasible) {
    if (q[static_cast<std::size_t>(idx)] > q[static_cast<std::size_t>(best)]) {
      best = idx;
    }
  }
  return best;
}

DqnAgent::DqnAgent(const DqnConfig& cfg, int obs_dim, int n_actions, std::uint64_t seed)
    : cfg_(cfg),
      online_(ParameterSet::init({obs_dim, cfg.hidden_dims, n_actions}, derive_seed(seed, 0))),
      target_(online_),
      adam_(AdamState::init(online_, cfg.learning_rate)) {
  if (cfg_.replay_capacity < cfg_.batch_size) {
    throw std::invalid_argument("DqnConfig: replay capacity below batch size");
  }
  replay_.reserve(static_cast<std::size_t>(cfg_.replay_capacity));
}

int DqnAgent::act(const StepContext& ctx, Rng& rng) {
  return dqn_act(online_, ctx.obs, ctx.mask, 0.0, rng);
}

double DqnAgent::epsilon_at(int episode_index) const {
  if (cfg_.epsilon_decay_episodes <= 0) {
    return cfg_.epsilon_end;
  }
  const double progress = std::min(
      1.0, static_cast<double>(episode_index) / static_cast<double>(cfg_.epsilon_decay_episodes));
  return cfg_.epsilon_start + (cfg_.epsilon_end - cfg_.epsilon_start) * progress;
}

void DqnAgent::store(const Transition& t) {
  if (replay_.size() < static_cast<std::size_t>(cfg_.replay_capacity)) {
    replay_.push_back(t);
  } else {
    replay_[replay_next_] = t;
  }
  replay_next_ = (replay_next_ + 1) % static_cast<std::size_t>(cfg_.replay_capacity);
}

double DqnAgent::update(Rng& rng) {
  if (!can_update()) {
    throw std::logic_error("DqnAgent::update: replay holds fewer transitions than a batch");
  }
  Gradients grads = Gradients::zeros_like(online_);
  ForwardCache cache;
  std::vector<double> dout(static_cast<std::size_t>(online_.spec.output_dim));
  const double inv_batch = 1.0 / static_cast<double>(cfg_.batch_size);
  double loss_sum = 0.0;

  for (int b = 0; b < cfg_.batch_size; ++b) {
    const Transition& t = replay_[rng.uniform_index(replay_.size())];

    double target_value = t.reward;
    if (!t.done) {
      const auto q_next = mlp_forward(target_, to_vec(t.next_obs));
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < t.next_mask.size(); ++i) {
        if (t.next_mask[i]) {
          best = std::max(best, q_next[i]);
        }
      }
      if (best == -std::numeric_limits<double>::infinity()) {
        throw std::logic_error("DqnAgent::update: transition with no feasible next action");
      }
      target_value += cfg_.discount * best;
    }

    const auto q = mlp_forward(online_, to_vec(t.obs), &cache);
    const double err = q[static_cast<std::size_t>(t.action)] - target_value;
    const double abs_err = std::abs(err);
    loss_sum += abs_err <= 1.0 ? 0.5 * err * err : abs_err - 0.5;
    const double grad = std::clamp(err, -1.0, 1.0);

    std::fill(dout.begin(), dout.end(), 0.0);
    dout[static_cast<std::size_t>(t.action)] = grad * inv_batch;
    mlp_backward(online_, cache, dout, grads);
  }

  adam_step(adam_, online_, grads);
  ++grad_steps_;
  if (grad_steps_ % cfg_.target_sync_interval == 0) {
    target_ = online_;
  }
  return loss_sum * inv_batch;
}

std::string DqnAgent::checkpoint_string() const {
  detail::ordered_json j;
  j["kind"] = "dqn";
  j["config"] = dqn_config_to_json(cfg_);
  j["online"] = detail::net_checkpoint_to_json({online_, adam_});
  j["target"] = detail::net_checkpoint_to_json({target_, std::nullopt});
  j["grad_steps"] = grad_steps_;
  return j.dump();
}

std::unique_ptr<DqnAgent> DqnAgent::from_checkpoint_string(const std::string& text) {
  const auto j = detail::ordered_json::parse(text);
  if (j.at("kind").get<std::string>() != "dqn") {
    throw std::invalid_argument("DqnAgent: checkpoint kind is not \"dqn\"");
  }
  const DqnConfig cfg = dqn_config_from_json(j.at("config"));
  NetCheckpoint online = detail::net_checkpoint_from_json(j.at("online"));
  NetCheckpoint target = detail::net_checkpoint_from_json(j.at("target"));
  if (!online.adam) {
    throw std::invalid_argument("DqnAgent: checkpoint is missing optimizer state");
  }
  auto agent = std::make_unique<DqnAgent>(cfg, online.params.spec.input_dim,
                                          online.params.spec.output_dim, online.params.init_seed);
  agent->online_ = std::move(online.params);
  agent->target_ = std::move(target.params);
  agent->adam_ = std::move(*online.adam);
  agent->grad_steps_ = j.at("grad_steps").get<std::int64_t>();
  return agent;
}

AllocationDecision sequential_decision(const Task& task, const UserEquipment& ue,
                                       double channel_gain, const EnvConfig& env,
                                       int comm_avail, int comp_avail) {
  std::vector<std::tuple<int, int, int>> pairs;  // (sum, k_comm, k_comp)
  pairs.reserve(env.menu.comm_options.size() * env.menu.comp_options.size());
  for (int kc : env.menu.comm_options) {
    for (int kp : env.menu.comp_options) {
      if (kc > 0 && kp > 0) {
        pairs.emplace_back(kc + kp, kc, kp);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());

  RadioParams radio = env.radio;
  radio.channel_gain = channel_gain;
  const double deadline = task.deadline.value_or(0.0);

  for (const auto& [sum, kc, kp] : pairs) {
    (void)sum;
    if (kc > comm_avail || kp > comp_avail) {
      continue;
    }
    const AllocationDecision decision = make_decision(kc, kp);
    const ExecutionOutcome out = execution_outcome(task, ue, radio, env.mec, decision);
    const bool qualifies = task.slice == SliceId::Urllc
                               ? out.t_trans + out.t_mec <= deadline
                               : out.e_mec < out.e_local;
    if (qualifies) {
      return decision;
    }
  }
  return {0, 0, false};
}

int SequentialBaseline::act(const StepContext& ctx, Rng& rng) {
  (void)rng;
  const AllocationDecision d =
      sequential_decision(ctx.task, ctx.ue, ctx.channel_gain, *ctx.env,
                          ctx.pools.comm_remaining, ctx.pools.comp_remaining);
  return menu_index_of(ctx.env->menu, d.k_comm, d.k_comp);
}

void FairBaseline::begin_episode(const EnvConfig& cfg) {
  for (int s = 0; s < 2; ++s) {
    sub_comm_[s] = cfg.mec.total_comm_rbs / 2;
    sub_comp_[s] = cfg.mec.total_comp_units / 2;
  }
}

int FairBaseline::act(const StepContext& ctx, Rng& rng) {
  (void)rng;
  const int s = ctx.task.slice == SliceId::Urllc ? 0 : 1;
  const AllocationDecision d = sequential_decision(ctx.task, ctx.ue, ctx.channel_gain,
                                                   *ctx.env, sub_comm_[s], sub_comp_[s]);
  sub_comm_[s] -= d.k_comm;
  sub_comp_[s] -= d.k_comp;
  return menu_index_of(ctx.env->menu, d.k_comm, d.k_comp);
}

int LocalOnlyBaseline::act(const StepContext& ctx, Rng& rng) {
  (void)rng;
  return ctx.env->menu.local_index();
}

int RandomPolicy::act(const StepContext& ctx, Rng& rng) {
  std::vector<int> feasible;
  feasible.reserve(ctx.mask.size());
  for (std::size_t i = 0; i < ctx.mask.size(); ++i) {
    if (ctx.mask[i]) {
      feasible.push_back(static_cast<int>(i));
    }
  }
  return feasible[rng.uniform_index(feasible.size())];
}

}  // namespace mecsim
