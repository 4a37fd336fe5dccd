#pragma once

#include <optional>
#include <vector>

#include "mecsim/env_model.hpp"
#include "mecsim/pools.hpp"

namespace mecsim {

struct RewardWeights {
  double alpha = 0.5;
  double beta = 0.5;
  double delta = 3.0;  // squash sharpness
  double slice_weight_urllc = 1.0;
  double slice_weight_mmtc = 1.0;
  double discount = 0.99;

  bool operator==(const RewardWeights&) const = default;
};

// 2/(1 + e^(-delta*r)) - 1, evaluated as tanh(delta*r/2). Maps all of R into
// (-1, 1) with squash(0) == 0 exactly.
double squash(double r, double delta);

// Latency-focused reward: alpha*(t_local - t_exe)/t_local + beta*(tau - t_exe)/tau,
// squashed. Positive when offloading beats local compute and meets the deadline.
double urllc_reward(const ExecutionOutcome& outcome, double deadline, const RewardWeights& w);

// Energy-aware reward: alpha*(t_local - t_exe)/t_local + beta*(e_local - e_exe)/e_local,
// squashed.
double mmtc_reward(const ExecutionOutcome& outcome, const RewardWeights& w);

// Slice-weighted per-step reward. The local branch is the neutral reference
// and scores exactly 0 for both slices; discounting across steps is the
// agents' job, not this function's.
double step_reward(SliceId slice, const ExecutionOutcome& outcome,
                   std::optional<double> deadline, const RewardWeights& w);

// Result of auditing a round's grants against the pool budgets. Violations
// are reported as data, never thrown.
struct PoolAudit {
  bool ok = true;
  int comm_overshoot = 0;
  int comp_overshoot = 0;

  bool operator==(const PoolAudit&) const = default;
};

PoolAudit check_pool_constraints(const std::vector<AllocationDecision>& grants,
                                 const ResourcePools& pools);

}  // namespace mecsim
