#include "mecsim/trace_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace mecsim {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json step_to_json(const EpisodeTrace& trace, std::size_t index) {
  const TraceStep& s = trace.steps[index];
  ordered_json j;
  j["episode_seed"] = trace.seed;
  j["step"] = index;
  j["slice"] = s.task.slice == SliceId::Urllc ? "urllc" : "mmtc";
  j["bytes"] = s.task.bytes;
  j["cycles"] = s.task.cycles;
  if (s.task.deadline) {
    j["deadline"] = *s.task.deadline;
  } else {
    j["deadline"] = nullptr;
  }
  j["distance"] = s.ue.distance;
  j["channel_gain"] = s.channel_gain;
  j["obs"] = s.obs;
  j["action_index"] = s.action_index;
  j["k_comm"] = s.decision.k_comm;
  j["k_comp"] = s.decision.k_comp;
  j["offload"] = s.decision.offload;
  ordered_json o;
  o["capacity"] = s.outcome.capacity;
  o["t_trans"] = s.outcome.t_trans;
  o["f_equiv"] = s.outcome.f_equiv;
  o["t_local"] = s.outcome.t_local;
  o["t_mec"] = s.outcome.t_mec;
  o["t_exe"] = s.outcome.t_exe;
  o["e_local"] = s.outcome.e_local;
  o["e_mec"] = s.outcome.e_mec;
  o["e_exe"] = s.outcome.e_exe;
  j["outcome"] = o;
  j["reward"] = s.reward;
  return j;
}

}  // namespace

std::string trace_to_jsonl(const EpisodeTrace& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    out += step_to_json(trace, i).dump();
    out += '\n';
  }
  return out;
}

void append_trace_jsonl(const EpisodeTrace& trace, const std::string& path) {
  std::ofstream file(path, std::ios::app | std::ios::binary);
  if (!file) {
    throw std::runtime_error("append_trace_jsonl: cannot open " + path);
  }
  file << trace_to_jsonl(trace);
}

}  // namespace mecsim
