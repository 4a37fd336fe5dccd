#include "mecsim/episode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace mecsim {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

int sample_count(Rng& rng, double mean, double variance) {
  const double draw = rng.normal(mean, std::sqrt(variance));
  return static_cast<int>(std::max(0L, std::lround(draw)));
}

Arrival sample_arrival(Rng& rng, const SliceArrivalConfig& cfg, SliceId slice,
                       const AreaConfig& area) {
  Arrival a;
  a.task.slice = slice;
  a.task.bytes = rng.uniform(cfg.bytes_min, cfg.bytes_max);
  a.task.cycles = rng.uniform(cfg.cycles_min, cfg.cycles_max);
  a.task.deadline = cfg.deadline;
  const double x = rng.uniform(-area.width / 2.0, area.width / 2.0);
  const double y = rng.uniform(-area.height / 2.0, area.height / 2.0);
  a.ue.distance = std::max(1.0, std::hypot(x, y));
  a.ue.local_cpu_freq = cfg.local_cpu_freq;
  a.ue.tx_power = cfg.tx_power;
  a.ue.local_process_power = cfg.local_process_power;
  a.ue.idle_power = 0.0;
  a.channel_gain = rng.exponential(1.0);
  return a;
}

}  // namespace

SliceArrivalConfig default_urllc_arrivals() {
  SliceArrivalConfig c;
  c.count_mean = 10.0;
  c.count_variance = 2.0;
  c.bytes_min = 2e6;
  c.bytes_max = 5e6;
  c.cycles_min = 1.8e8;
  c.cycles_max = 6.6e8;
  c.deadline = 0.7;
  c.local_cpu_freq = 6e8;
  c.tx_power = 0.2;
  c.local_process_power = 0.4;
  return c;
}

SliceArrivalConfig default_mmtc_arrivals() {
  SliceArrivalConfig c;
  c.count_mean = 30.0;
  c.count_variance = 5.0;
  c.bytes_min = 2e6;
  c.bytes_max = 5e6;
  c.cycles_min = 6e7;
  c.cycles_max = 2.2e8;
  c.deadline = std::nullopt;
  c.local_cpu_freq = 2e8;
  c.tx_power = 0.2;
  c.local_process_power = 0.4;
  return c;
}

ActionMenu ActionMenu::defaults() {
  return {{0, 1, 2, 4, 8, 16}, {0, 1, 2, 4, 8, 12}};
}

int ActionMenu::pair_comm(int index) const {
  return comm_options[static_cast<std::size_t>(index) / comp_options.size()];
}

int ActionMenu::pair_comp(int index) const {
  return comp_options[static_cast<std::size_t>(index) % comp_options.size()];
}

AllocationDecision ActionMenu::decision_at(int index) const {
  if (index < 0 || index >= size()) {
    throw std::out_of_range("ActionMenu::decision_at: index out of range");
  }
  return make_decision(pair_comm(index), pair_comp(index));
}

void ActionMenu::validate() const {
  for (const auto* opts : {&comm_options, &comp_options}) {
    if (opts->empty() || opts->front() != 0) {
      throw std::invalid_argument("ActionMenu: option lists must start with 0");
    }
    for (std::size_t i = 1; i < opts->size(); ++i) {
      if ((*opts)[i] <= (*opts)[i - 1]) {
        throw std::invalid_argument("ActionMenu: option lists must increase strictly");
      }
    }
  }
}

NormalizationBounds NormalizationBounds::derived(const RadioParams& radio,
                                                 const SliceArrivalConfig& urllc,
                                                 const SliceArrivalConfig& mmtc) {
  NormalizationBounds b;
  b.bytes_max = std::max(urllc.bytes_max, mmtc.bytes_max);
  b.cycles_max = std::max(urllc.cycles_max, mmtc.cycles_max);
  b.deadline_max = 1.0;
  RadioParams unit_gain = radio;
  unit_gain.channel_gain = 1.0;
  UserEquipment closest;
  closest.distance = 1.0;
  closest.tx_power = std::max(urllc.tx_power, mmtc.tx_power);
  b.capacity_max = channel_capacity(1, unit_gain, closest);
  b.local_freq_max = std::max(urllc.local_cpu_freq, mmtc.local_cpu_freq);
  return b;
}

EnvConfig::EnvConfig()
    : urllc(default_urllc_arrivals()),
      mmtc(default_mmtc_arrivals()),
      menu(ActionMenu::defaults()),
      bounds(NormalizationBounds::derived(radio, urllc, mmtc)) {}

std::vector<Arrival> sample_arrivals(Rng& rng, const EnvConfig& cfg) {
  const int n_urllc = sample_count(rng, cfg.urllc.count_mean, cfg.urllc.count_variance);
  const int n_mmtc = sample_count(rng, cfg.mmtc.count_mean, cfg.mmtc.count_variance);

  std::vector<Arrival> arrivals;
  arrivals.reserve(static_cast<std::size_t>(n_urllc + n_mmtc));
  for (int i = 0; i < n_urllc; ++i) {
    arrivals.push_back(sample_arrival(rng, cfg.urllc, SliceId::Urllc, cfg.area));
  }
  for (int i = 0; i < n_mmtc; ++i) {
    arrivals.push_back(sample_arrival(rng, cfg.mmtc, SliceId::Mmtc, cfg.area));
  }
  for (std::size_t i = arrivals.size(); i > 1; --i) {
    std::swap(arrivals[i - 1], arrivals[rng.uniform_index(i)]);
  }
  return arrivals;
}

Observation build_observation(const Task& task, const UserEquipment& ue,
                              const RadioParams& radio, const MecParams& mec,
                              const ResourcePools& pools, const NormalizationBounds& bounds) {
  Observation obs;
  obs[0] = task.slice == SliceId::Urllc ? 0.0 : 1.0;
  obs[1] = clamp01(task.bytes / bounds.bytes_max);
  obs[2] = clamp01(task.cycles / bounds.cycles_max);
  obs[3] = task.deadline ? clamp01(*task.deadline / bounds.deadline_max) : 0.0;
  obs[4] = clamp01(channel_capacity(1, radio, ue) / bounds.capacity_max);
  obs[5] = clamp01(static_cast<double>(pools.comm_remaining) / pools.comm_total);
  obs[6] = clamp01(static_cast<double>(pools.comp_remaining) / pools.comp_total);
  obs[7] = clamp01(ue.local_cpu_freq / bounds.local_freq_max);
  obs[8] = 1.0;  // unit_freq normalized by itself
  (void)mec;
  return obs;
}

ActionMask feasible_action_mask(const ActionMenu& menu, const ResourcePools& pools) {
  ActionMask mask(static_cast<std::size_t>(menu.size()));
  for (int i = 0; i < menu.size(); ++i) {
    mask[static_cast<std::size_t>(i)] =
        menu.pair_comm(i) <= pools.comm_remaining && menu.pair_comp(i) <= pools.comp_remaining;
  }
  return mask;
}

ApplyResult apply_action(ResourcePools& pools, const Task& task, const UserEquipment& ue,
                         double channel_gain, const EnvConfig& cfg,
                         const AllocationDecision& decision) {
  if (decision.k_comm > pools.comm_remaining || decision.k_comp > pools.comp_remaining) {
    throw std::logic_error("apply_action: decision exceeds remaining pools");
  }
  pools.comm_remaining -= decision.k_comm;
  pools.comp_remaining -= decision.k_comp;

  RadioParams radio = cfg.radio;
  radio.channel_gain = channel_gain;

  ApplyResult res;
  res.outcome = execution_outcome(task, ue, radio, cfg.mec, decision);
  res.reward = step_reward(task.slice, res.outcome, task.deadline, cfg.weights);
  return res;
}

EpisodeTrace run_episode(Policy& policy, Rng& rng, const EnvConfig& cfg) {
  cfg.menu.validate();
  policy.begin_episode(cfg);

  EpisodeTrace trace;
  const auto arrivals = sample_arrivals(rng, cfg);
  ResourcePools pools = make_pools(cfg.mec.total_comm_rbs, cfg.mec.total_comp_units);
  trace.pools_before = pools;
  trace.steps.reserve(arrivals.size());

  for (const auto& arrival : arrivals) {
    RadioParams radio = cfg.radio;
    radio.channel_gain = arrival.channel_gain;

    StepContext ctx;
    ctx.obs = build_observation(arrival.task, arrival.ue, radio, cfg.mec, pools, cfg.bounds);
    ctx.mask = feasible_action_mask(cfg.menu, pools);
    ctx.task = arrival.task;
    ctx.ue = arrival.ue;
    ctx.channel_gain = arrival.channel_gain;
    ctx.pools = pools;
    ctx.env = &cfg;

    const int action = policy.act(ctx, rng);
    if (action < 0 || action >= cfg.menu.size() ||
        !ctx.mask[static_cast<std::size_t>(action)]) {
      throw std::logic_error("run_episode: policy returned an infeasible action");
    }
    const AllocationDecision decision = cfg.menu.decision_at(action);
    const ApplyResult res =
        apply_action(pools, arrival.task, arrival.ue, arrival.channel_gain, cfg, decision);

    TraceStep step;
    step.task = arrival.task;
    step.ue = arrival.ue;
    step.channel_gain = arrival.channel_gain;
    step.obs = ctx.obs;
    step.mask = std::move(ctx.mask);
    step.action_index = action;
    step.decision = decision;
    step.outcome = res.outcome;
    step.reward = res.reward;
    trace.steps.push_back(std::move(step));
  }

  trace.pools_after = pools;
  return trace;
}

EpisodeTrace run_episode(Policy& policy, std::uint64_t seed, const EnvConfig& cfg) {
  Rng rng(seed);
  EpisodeTrace trace = run_episode(policy, rng, cfg);
  trace.seed = seed;
  return trace;
}

void MetricsAccumulator::add(const EpisodeTrace& trace) {
  for (const auto& step : trace.steps) {
    t_exe_all_ += step.outcome.t_exe;
    t_local_all_ += step.outcome.t_local;
    if (step.task.slice == SliceId::Urllc) {
      t_exe_urllc_ += step.outcome.t_exe;
      t_local_urllc_ += step.outcome.t_local;
      ++urllc_tasks_;
      urllc_accepted_ += step.decision.offload ? 1 : 0;
    } else {
      e_exe_mmtc_ += step.outcome.e_exe;
      e_local_mmtc_ += step.outcome.e_local;
      ++mmtc_tasks_;
      mmtc_accepted_ += step.decision.offload ? 1 : 0;
    }
    reward_sum_ += step.reward;
  }
  ++episodes_;
}

RoundMetrics MetricsAccumulator::finalize() const {
  if (t_local_all_ == 0.0) {
    throw std::domain_error("MetricsAccumulator: no tasks aggregated");
  }
  if (t_local_urllc_ == 0.0) {
    throw std::domain_error("MetricsAccumulator: no URLLC tasks aggregated");
  }
  if (e_local_mmtc_ == 0.0) {
    throw std::domain_error("MetricsAccumulator: no mMTC tasks aggregated");
  }
  RoundMetrics m;
  // Ratio first: an all-local aggregate has bit-equal numerator and
  // denominator, and (a / a) * 100 lands on 100 exactly where (100 * a) / a
  // can round away.
  m.total_time_pct = 100.0 * (t_exe_all_ / t_local_all_);
  m.mmtc_energy_pct = 100.0 * (e_exe_mmtc_ / e_local_mmtc_);
  m.urllc_time_pct = 100.0 * (t_exe_urllc_ / t_local_urllc_);
  m.urllc_tasks = urllc_tasks_;
  m.urllc_accepted = urllc_accepted_;
  m.mmtc_tasks = mmtc_tasks_;
  m.mmtc_accepted = mmtc_accepted_;
  return m;
}

double MetricsAccumulator::mean_episode_reward() const {
  if (episodes_ == 0) {
    throw std::domain_error("MetricsAccumulator: no episodes aggregated");
  }
  return reward_sum_ / static_cast<double>(episodes_);
}

RoundMetrics aggregate_metrics(const std::vector<EpisodeTrace>& traces) {
  if (traces.empty()) {
    throw std::invalid_argument("aggregate_metrics: no traces");
  }
  MetricsAccumulator acc;
  for (const auto& t : traces) {
    acc.add(t);
  }
  return acc.finalize();
}

}  // namespace mecsim
