#pragma once

#include <optional>

namespace mecsim {

enum class SliceId { Urllc, Mmtc };

// One offloadable workload: payload size, compute demand, and (URLLC only) a
// hard latency deadline. mMTC tasks carry no deadline.
struct Task {
  double bytes = 0.0;
  double cycles = 0.0;
  std::optional<double> deadline;  // seconds
  SliceId slice = SliceId::Mmtc;

  bool operator==(const Task&) const = default;
};

struct UserEquipment {
  double distance = 1.0;             // meters to the base station
  double local_cpu_freq = 1.0;       // Hz
  double tx_power = 0.0;             // watts, uplink transmit power
  double local_process_power = 0.0;  // watts while computing locally
  double idle_power = 0.0;           // watts while waiting on the server

  bool operator==(const UserEquipment&) const = default;
};

struct RadioParams {
  double rb_bandwidth = 4e6;      // Hz per resource block
  double path_loss_exp = 2.8;
  double noise_variance = 3e-13;  // watts
  double channel_gain = 1.0;      // |h|^2, one Rayleigh draw per task

  bool operator==(const RadioParams&) const = default;
};

struct MecParams {
  double unit_freq = 2e9;  // Hz per computation unit
  int total_comp_units = 40;
  int total_comm_rbs = 80;

  bool operator==(const MecParams&) const = default;
};

// Resource grant for one task. offload is true exactly when both grant
// counts are positive; a local decision carries zero grants.
struct AllocationDecision {
  int k_comm = 0;
  int k_comp = 0;
  bool offload = false;

  bool operator==(const AllocationDecision&) const = default;
};

// Builds a decision from raw grant counts. A pair granting only one resource
// type cannot execute remotely, so it collapses to the local decision.
AllocationDecision make_decision(int k_comm, int k_comp);

// Every derived quantity for one (task, decision) pairing. The local branch
// leaves the uplink/server fields at zero.
struct ExecutionOutcome {
  double capacity = 0.0;  // bits/s over the granted RBs
  double t_trans = 0.0;   // s
  double f_equiv = 0.0;   // Hz aggregated over granted computation units
  double t_local = 0.0;   // s
  double t_mec = 0.0;     // s
  double t_exe = 0.0;     // s, realized latency under the decision
  double e_local = 0.0;   // J
  double e_mec = 0.0;     // J
  double e_exe = 0.0;     // J, realized UE energy under the decision

  bool operator==(const ExecutionOutcome&) const = default;
};

// Uplink capacity over k_comm resource blocks:
//   k * B * log2(1 + P * d^(-eta) * |h|^2 / sigma_n^2)
// Linear in k by construction; zero blocks carry nothing.
double channel_capacity(int k_comm, const RadioParams& radio, const UserEquipment& ue);

// Uplink delay for the task payload; bytes are converted to bits.
double transmission_delay(const Task& task, double capacity);

// Aggregate server frequency over k_comp computation units.
double mec_equiv_frequency(int k_comp, const MecParams& mec);

double local_processing_time(const Task& task, const UserEquipment& ue);

double mec_processing_time(const Task& task, double f_equiv);

double local_energy(const UserEquipment& ue, double t_local);

// UE-side energy for an offloaded task: transmit energy plus idle energy
// while the server computes (idle power is zero in this model).
double mec_energy(const UserEquipment& ue, double t_trans, double t_mec);

// Composes the operations above into the full outcome for one decision.
ExecutionOutcome execution_outcome(const Task& task, const UserEquipment& ue,
                                   const RadioParams& radio, const MecParams& mec,
                                   const AllocationDecision& decision);

}  // namespace mecsim
