#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mecsim/episode.hpp"
#include "mecsim/nn.hpp"

namespace mecsim {

struct PpoConfig {
  double clip_epsilon = 0.2;
  double gae_lambda = 0.95;
  int epochs_per_update = 4;
  int episodes_per_rollout = 16;
  int batch_size = 32;
  double value_loss_coeff = 0.5;
  double entropy_coeff = 0.01;
  double learning_rate = 1e-4;
  double discount = 0.99;
  std::vector<int> hidden_dims{128, 256, 128, 64};

  bool operator==(const PpoConfig&) const = default;
};

struct DqnConfig {
  int replay_capacity = 50000;
  int target_sync_interval = 1000;  // gradient steps between hard target copies
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_decay_episodes = 10000;
  int batch_size = 32;
  double learning_rate = 1e-4;
  double discount = 0.99;
  std::vector<int> hidden_dims{128, 256, 128, 64};

  bool operator==(const DqnConfig&) const = default;
};

// Flat storage for collected transitions, episodes concatenated in order.
struct RolloutBuffer {
  std::vector<Observation> obs;
  std::vector<ActionMask> masks;
  std::vector<int> actions;
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<std::uint8_t> dones;

  std::size_t size() const { return actions.size(); }
  void clear();
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Generalized advantage estimation over concatenated episodes; a set done
// flag stops bootstrapping across the boundary. Terminal bootstrap value 0.
GaeResult compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                      const std::vector<std::uint8_t>& dones, double discount,
                      double gae_lambda);

// min(ratio * advantage, clip(ratio, 1 - eps, 1 + eps) * advantage)
double clipped_surrogate(double ratio, double advantage, double clip_epsilon);

struct PpoLossStats {
  double policy_loss = 0.0;  // mean of -surrogate
  double value_loss = 0.0;   // mean squared value error (unweighted)
  double entropy = 0.0;      // mean policy entropy
  double clip_fraction = 0.0;
  int minibatches = 0;
};

struct EpisodeStats {
  int steps = 0;
  double reward_sum = 0.0;
};

using EpisodeCallback = std::function<void(int episode_index, const EpisodeStats&)>;

// PPO with a single categorical head over the joint action menu and a
// separate value network. As a Policy it acts greedily (evaluation mode);
// training goes through collect_rollouts/update.
class PpoAgent : public Policy {
public:
  PpoAgent(const PpoConfig& cfg, int obs_dim, int n_actions, std::uint64_t seed);

  int act(const StepContext& ctx, Rng& rng) override;
  bool deterministic() const override { return true; }

  // Samples an action for training; reports its log-probability and the
  // critic's value estimate.
  int sample_action(const Observation& obs, const ActionMask& mask, Rng& rng,
                    double* log_prob, double* value);

  // Runs n_episodes episodes, appending transitions to buf. Episode i uses
  // the sub-seed derive_seed(master_seed, first_episode_index + i).
  void collect_rollouts(const EnvConfig& env, std::uint64_t master_seed,
                        int first_episode_index, int n_episodes, RolloutBuffer& buf,
                        const EpisodeCallback& on_episode = nullptr);

  // One PPO update over the buffer: GAE, per-update advantage normalization,
  // then epochs_per_update passes of shuffled minibatches. The rng drives
  // only the shuffles. Throws on non-finite loss.
  PpoLossStats update(const RolloutBuffer& buf, Rng& rng);

  const PpoConfig& config() const { return cfg_; }
  const ParameterSet& actor() const { return actor_; }
  const ParameterSet& critic() const { return critic_; }

  std::string checkpoint_string() const;
  static std::unique_ptr<PpoAgent> from_checkpoint_string(const std::string& text);

private:
  PpoConfig cfg_;
  ParameterSet actor_;
  ParameterSet critic_;
  AdamState actor_adam_;
  AdamState critic_adam_;
};

// Epsilon-greedy over the feasible entries of a Q vector.
int dqn_act(const ParameterSet& q_net, const Observation& obs, const ActionMask& mask,
            double epsilon, Rng& rng);

struct Transition {
  Observation obs{};
  int action = 0;
  double reward = 0.0;
  Observation next_obs{};
  ActionMask next_mask;
  std::uint8_t done = 0;
};

// DQN with uniform replay, Huber loss, and hard target sync. As a Policy it
// acts greedily (epsilon 0).
class DqnAgent : public Policy {
public:
  DqnAgent(const DqnConfig& cfg, int obs_dim, int n_actions, std::uint64_t seed);

  int act(const StepContext& ctx, Rng& rng) override;
  bool deterministic() const override { return true; }

  double epsilon_at(int episode_index) const;
  void store(const Transition& t);
  std::size_t replay_size() const { return replay_.size(); }
  bool can_update() const { return replay_.size() >= static_cast<std::size_t>(cfg_.batch_size); }

  // One minibatch update; returns the mean Huber loss. Throws if the replay
  // holds fewer than batch_size transitions.
  double update(Rng& rng);

  const DqnConfig& config() const { return cfg_; }
  const ParameterSet& online() const { return online_; }
  const ParameterSet& target() const { return target_; }

  std::string checkpoint_string() const;
  static std::unique_ptr<DqnAgent> from_checkpoint_string(const std::string& text);

private:
  DqnConfig cfg_;
  ParameterSet online_;
  ParameterSet target_;
  AdamState adam_;
  std::vector<Transition> replay_;
  std::size_t replay_next_ = 0;
  std::int64_t grad_steps_ = 0;
};

// First menu pair, scanning by ascending (k_comm + k_comp) then k_comm, that
// fits the available counts and meets the slice criterion: URLLC offloads
// must finish within the deadline, mMTC offloads must cost less energy than
// local processing. Local when nothing qualifies.
AllocationDecision sequential_decision(const Task& task, const UserEquipment& ue,
                                       double channel_gain, const EnvConfig& env,
                                       int comm_avail, int comp_avail);

class SequentialBaseline : public Policy {
public:
  int act(const StepContext& ctx, Rng& rng) override;
  bool deterministic() const override { return true; }
};

// Sequential rule against per-slice sub-pools, each half of the shared total,
// reset every round.
class FairBaseline : public Policy {
public:
  int act(const StepContext& ctx, Rng& rng) override;
  bool deterministic() const override { return true; }
  void begin_episode(const EnvConfig& cfg) override;

private:
  int sub_comm_[2] = {0, 0};
  int sub_comp_[2] = {0, 0};
};

class LocalOnlyBaseline : public Policy {
public:
  int act(const StepContext& ctx, Rng& rng) override;
  bool deterministic() const override { return true; }
};

// Uniform over the feasible menu entries; exercises the mask machinery.
class RandomPolicy : public Policy {
public:
  int act(const StepContext& ctx, Rng& rng) override;
  bool deterministic() const override { return false; }
};

}  // namespace mecsim
