#include "mecsim/reward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mecsim {

double squash(double r, double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("squash: delta must be positive");
  }
  return std::tanh(0.5 * delta * r);
}

double urllc_reward(const ExecutionOutcome& outcome, double deadline, const RewardWeights& w) {
  if (!(deadline > 0.0)) {
    throw std::invalid_argument("urllc_reward: deadline must be positive");
  }
  if (!(outcome.t_local > 0.0)) {
    throw std::invalid_argument("urllc_reward: t_local must be positive");
  }
  const double r = w.alpha * (outcome.t_local - outcome.t_exe) / outcome.t_local +
                   w.beta * (deadline - outcome.t_exe) / deadline;
  return squash(r, w.delta);
}

double mmtc_reward(const ExecutionOutcome& outcome, const RewardWeights& w) {
  if (!(outcome.t_local > 0.0)) {
    throw std::invalid_argument("mmtc_reward: t_local must be positive");
  }
  if (!(outcome.e_local > 0.0)) {
    throw std::invalid_argument("mmtc_reward: e_local must be positive");
  }
  const double r = w.alpha * (outcome.t_local - outcome.t_exe) / outcome.t_local +
                   w.beta * (outcome.e_local - outcome.e_exe) / outcome.e_local;
  return squash(r, w.delta);
}

double step_reward(SliceId slice, const ExecutionOutcome& outcome,
                   std::optional<double> deadline, const RewardWeights& w) {
  if (slice == SliceId::Urllc && !deadline.has_value()) {
    throw std::invalid_argument("step_reward: URLLC task without a deadline");
  }
  if (slice == SliceId::Mmtc && deadline.has_value()) {
    throw std::invalid_argument("step_reward: mMTC task with a deadline");
  }
  if (outcome.t_exe == outcome.t_local && outcome.e_exe == outcome.e_local) {
    return 0.0;  // local branch; the do-nothing reference
  }
  if (slice == SliceId::Urllc) {
    return w.slice_weight_urllc * urllc_reward(outcome, *deadline, w);
  }
  return w.slice_weight_mmtc * mmtc_reward(outcome, w);
}

PoolAudit check_pool_constraints(const std::vector<AllocationDecision>& grants,
                                 const ResourcePools& pools) {
  long long comm_sum = 0;
  long long comp_sum = 0;
  for (const auto& g : grants) {
    comm_sum += g.k_comm;
    comp_sum += g.k_comp;
  }
  PoolAudit audit;
  audit.comm_overshoot = static_cast<int>(std::max(0LL, comm_sum - pools.comm_total));
  audit.comp_overshoot = static_cast<int>(std::max(0LL, comp_sum - pools.comp_total));
  audit.ok = audit.comm_overshoot == 0 && audit.comp_overshoot == 0;
  return audit;
}

}  // namespace mecsim
