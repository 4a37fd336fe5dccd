#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "mecsim/env_model.hpp"
#include "mecsim/pools.hpp"
#include "mecsim/reward.hpp"
#include "mecsim/rng.hpp"

namespace mecsim {

// Arrival statistics and UE hardware profile for one slice.
struct SliceArrivalConfig {
  double count_mean = 0.0;
  double count_variance = 0.0;
  double bytes_min = 0.0;
  double bytes_max = 0.0;
  double cycles_min = 0.0;
  double cycles_max = 0.0;
  std::optional<double> deadline;  // seconds; set for URLLC, absent for mMTC
  double local_cpu_freq = 1.0;
  double tx_power = 0.0;
  double local_process_power = 0.0;

  bool operator==(const SliceArrivalConfig&) const = default;
};

SliceArrivalConfig default_urllc_arrivals();
SliceArrivalConfig default_mmtc_arrivals();

// Coverage rectangle with the base station at the center.
struct AreaConfig {
  double width = 2000.0;   // meters
  double height = 3000.0;  // meters

  bool operator==(const AreaConfig&) const = default;
};

// Discrete grant menu shared by every policy. The joint action space is the
// cross product comm_options x comp_options, flattened row-major:
//   index = i_comm * comp_options.size() + i_comp.
struct ActionMenu {
  std::vector<int> comm_options;
  std::vector<int> comp_options;

  static ActionMenu defaults();  // {0,1,2,4,8,16} x {0,1,2,4,8,12}

  int size() const { return static_cast<int>(comm_options.size() * comp_options.size()); }
  int pair_comm(int index) const;
  int pair_comp(int index) const;
  // Decision for a menu index; pairs granting only one resource type
  // collapse to the local decision (see make_decision).
  AllocationDecision decision_at(int index) const;
  int local_index() const { return 0; }
  // Throws unless both option lists start at 0 and increase strictly.
  void validate() const;

  bool operator==(const ActionMenu&) const = default;
};

// Fixed min-max bounds used to normalize observations. Stationary across a
// run so sweeps do not shift the agent's input distribution.
struct NormalizationBounds {
  double bytes_max = 1.0;
  double cycles_max = 1.0;
  double deadline_max = 1.0;
  double capacity_max = 1.0;    // per-RB capacity bound; values above clip to 1
  double local_freq_max = 1.0;

  // Bounds implied by the environment: task maxima across slices, capacity
  // of one RB at 1 m with unit gain and the larger slice tx power.
  static NormalizationBounds derived(const RadioParams& radio,
                                     const SliceArrivalConfig& urllc,
                                     const SliceArrivalConfig& mmtc);

  bool operator==(const NormalizationBounds&) const = default;
};

struct EnvConfig {
  RadioParams radio;  // channel_gain field is ignored; per-task gains are stamped in
  MecParams mec;
  AreaConfig area;
  SliceArrivalConfig urllc;
  SliceArrivalConfig mmtc;
  ActionMenu menu;
  NormalizationBounds bounds;
  RewardWeights weights;

  EnvConfig();

  bool operator==(const EnvConfig&) const = default;
};

// Layout: [0] slice code (URLLC=0, mMTC=1), [1] bytes, [2] cycles,
// [3] deadline (0 when absent), [4] per-RB capacity, [5] comm remaining,
// [6] comp remaining, [7] UE cpu frequency, [8] MEC unit frequency.
// Every component is min-max normalized into [0, 1].
using Observation = std::array<double, 9>;

using ActionMask = std::vector<std::uint8_t>;

struct Arrival {
  Task task;
  UserEquipment ue;
  double channel_gain = 1.0;

  bool operator==(const Arrival&) const = default;
};

// One round of arrivals: per-slice Gaussian counts (rounded, clamped at 0),
// uniform task attributes, UEs placed uniformly in the area (distance floored
// at 1 m), one Rayleigh power gain per task, then a uniform shuffle across
// slices.
std::vector<Arrival> sample_arrivals(Rng& rng, const EnvConfig& cfg);

Observation build_observation(const Task& task, const UserEquipment& ue,
                              const RadioParams& radio, const MecParams& mec,
                              const ResourcePools& pools, const NormalizationBounds& bounds);

// Menu pair (k_comm, k_comp) is feasible iff both grants fit the remaining
// pools; (0,0) is always feasible.
ActionMask feasible_action_mask(const ActionMenu& menu, const ResourcePools& pools);

// Everything a policy may consult when choosing a menu index for one task.
struct StepContext {
  Observation obs{};
  ActionMask mask;
  Task task;
  UserEquipment ue;
  double channel_gain = 1.0;
  ResourcePools pools;
  const EnvConfig* env = nullptr;
};

class Policy {
public:
  virtual ~Policy() = default;
  // Returns a menu index; must be feasible under ctx.mask.
  virtual int act(const StepContext& ctx, Rng& rng) = 0;
  virtual bool deterministic() const = 0;
  // Called once per episode before the first task; resets per-round state.
  virtual void begin_episode(const EnvConfig& cfg) { (void)cfg; }
};

struct ApplyResult {
  double reward = 0.0;
  ExecutionOutcome outcome;
};

// Decrements the pools by the grant and computes the outcome and reward for
// one task. Throws if the decision does not fit the remaining pools: the
// feasibility mask contract was violated upstream.
ApplyResult apply_action(ResourcePools& pools, const Task& task, const UserEquipment& ue,
                         double channel_gain, const EnvConfig& cfg,
                         const AllocationDecision& decision);

struct TraceStep {
  Task task;
  UserEquipment ue;
  double channel_gain = 1.0;
  Observation obs{};
  ActionMask mask;
  int action_index = 0;
  AllocationDecision decision;
  ExecutionOutcome outcome;
  double reward = 0.0;

  bool operator==(const TraceStep&) const = default;
};

struct EpisodeTrace {
  std::uint64_t seed = 0;
  ResourcePools pools_before;
  ResourcePools pools_after;
  std::vector<TraceStep> steps;

  bool operator==(const EpisodeTrace&) const = default;
};

// Runs one round: samples arrivals, resets pools to the totals, then decides
// each task in order against the depleting pools. Grants persist for the
// whole round. The rng drives both arrivals and any policy sampling.
EpisodeTrace run_episode(Policy& policy, Rng& rng, const EnvConfig& cfg);

// Seeded convenience overload; records the seed in the trace.
EpisodeTrace run_episode(Policy& policy, std::uint64_t seed, const EnvConfig& cfg);

struct RoundMetrics {
  double total_time_pct = 0.0;
  double mmtc_energy_pct = 0.0;
  double urllc_time_pct = 0.0;
  std::int64_t urllc_tasks = 0;
  std::int64_t urllc_accepted = 0;  // offloaded
  std::int64_t mmtc_tasks = 0;
  std::int64_t mmtc_accepted = 0;

  bool operator==(const RoundMetrics&) const = default;
};

// Streaming aggregation over traces: sums are pooled across every trace
// before any division, so the result is independent of trace order and
// grouping.
class MetricsAccumulator {
public:
  void add(const EpisodeTrace& trace);
  // Throws if a metric denominator is zero (no tasks seen for it).
  RoundMetrics finalize() const;
  double mean_episode_reward() const;
  std::int64_t episodes() const { return episodes_; }

private:
  double t_exe_all_ = 0.0, t_local_all_ = 0.0;
  double e_exe_mmtc_ = 0.0, e_local_mmtc_ = 0.0;
  double t_exe_urllc_ = 0.0, t_local_urllc_ = 0.0;
  std::int64_t urllc_tasks_ = 0, urllc_accepted_ = 0;
  std::int64_t mmtc_tasks_ = 0, mmtc_accepted_ = 0;
  double reward_sum_ = 0.0;
  std::int64_t episodes_ = 0;
};

RoundMetrics aggregate_metrics(const std::vector<EpisodeTrace>& traces);

}  // namespace mecsim
