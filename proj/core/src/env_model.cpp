#include "mecsim/env_model.hpp"

#include <cmath>
#include <stdexcept>

namespace mecsim {

AllocationDecision make_decision(int k_comm, int k_comp) {
  if (k_comm < 0 || k_comp < 0) {
    throw std::invalid_argument("make_decision: grant counts must be non-negative");
  }
  if (k_comm > 0 && k_comp > 0) {
    return {k_comm, k_comp, true};
  }
  return {0, 0, false};
}

double channel_capacity(int k_comm, const RadioParams& radio, const UserEquipment& ue) {
  if (k_comm < 0) {
    throw std::invalid_argument("channel_capacity: k_comm must be non-negative");
  }
  if (!(ue.distance > 0.0)) {
    throw std::invalid_argument("channel_capacity: distance must be positive");
  }
  if (!(radio.noise_variance > 0.0)) {
    throw std::invalid_argument("channel_capacity: noise variance must be positive");
  }
  if (!(radio.rb_bandwidth > 0.0) || !(radio.path_loss_exp > 0.0)) {
    throw std::invalid_argument("channel_capacity: radio parameters must be positive");
  }
  if (k_comm == 0) {
    return 0.0;
  }
  const double snr = ue.tx_power * std::pow(ue.distance, -radio.path_loss_exp) *
                     radio.channel_gain / radio.noise_variance;
  const double per_rb = radio.rb_bandwidth * std::log2(1.0 + snr);
  return static_cast<double>(k_comm) * per_rb;
}

double transmission_delay(const Task& task, double capacity) {
  if (!(capacity > 0.0)) {
    throw std::invalid_argument("transmission_delay: no uplink granted (capacity is zero)");
  }
  return task.bytes * 8.0 / capacity;
}

double mec_equiv_frequency(int k_comp, const MecParams& mec) {
  if (k_comp < 0) {
    throw std::invalid_argument("mec_equiv_frequency: k_comp must be non-negative");
  }
  return static_cast<double>(k_comp) * mec.unit_freq;
}

double local_processing_time(const Task& task, const UserEquipment& ue) {
  if (!(ue.local_cpu_freq > 0.0)) {
    throw std::invalid_argument("local_processing_time: local CPU frequency must be positive");
  }
  return task.cycles / ue.local_cpu_freq;
}

double mec_processing_time(const Task& task, double f_equiv) {
  if (!(f_equiv > 0.0)) {
    throw std::invalid_argument("mec_processing_time: no computation units granted");
  }
  return task.cycles / f_equiv;
}

double local_energy(const UserEquipment& ue, double t_local) {
  return ue.local_process_power * t_local;
}

double mec_energy(const UserEquipment& ue, double t_trans, double t_mec) {
  return ue.tx_power * t_trans + ue.idle_power * t_mec;
}

ExecutionOutcome execution_outcome(const Task& task, const UserEquipment& ue,
                                   const RadioParams& radio, const MecParams& mec,
                                   const AllocationDecision& decision) {
  const bool grants_positive = decision.k_comm > 0 && decision.k_comp > 0;
  if (decision.offload != grants_positive ||
      (!decision.offload && (decision.k_comm != 0 || decision.k_comp != 0))) {
    throw std::invalid_argument("execution_outcome: malformed decision");
  }

  ExecutionOutcome out;
  out.t_local = local_processing_time(task, ue);
  out.e_local = local_energy(ue, out.t_local);
  if (decision.offload) {
    out.capacity = channel_capacity(decision.k_comm, radio, ue);
    out.t_trans = transmission_delay(task, out.capacity);
    out.f_equiv = mec_equiv_frequency(decision.k_comp, mec);
    out.t_mec = mec_processing_time(task, out.f_equiv);
    out.e_mec = mec_energy(ue, out.t_trans, out.t_mec);
    out.t_exe = out.t_trans + out.t_mec;
    out.e_exe = out.e_mec;
  } else {
    out.t_exe = out.t_local;
    out.e_exe = out.e_local;
  }
  return out;
}

}  // namespace mecsim
