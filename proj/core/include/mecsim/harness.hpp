#pragma once

#include <ctime>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "mecsim/agents.hpp"
#include "mecsim/config.hpp"
#include "mecsim/episode.hpp"

namespace mecsim {

// One metrics CSV row: a policy evaluated at one sweep point (or standalone,
// with sweep_var "none").
struct MetricsRow {
  std::string sweep_var = "none";
  double sweep_value = 0.0;
  std::string policy;
  int experiments = 0;
  double total_time_pct = 0.0;
  double mmtc_energy_pct = 0.0;
  double urllc_time_pct = 0.0;
  double mean_episode_reward = 0.0;
  double urllc_acceptance_rate = 0.0;
  double mmtc_acceptance_rate = 0.0;

  bool operator==(const MetricsRow&) const = default;
};

std::string metrics_csv_header();
// Without trailing newline. Doubles carry full round-trip precision so
// repeated runs produce byte-identical files.
std::string metrics_csv_row(const MetricsRow& row);

// Runs `experiments` episodes of the policy, episode i seeded with
// derive_seed(master_seed, i) so different policies see identical rounds.
// on_trace, when set, observes every finished episode in order.
MetricsRow evaluate_policy(Policy& policy, const EnvConfig& env, std::uint64_t master_seed,
                           int experiments, const std::string& name,
                           const std::function<void(const EpisodeTrace&)>& on_trace = nullptr);

// Builds a policy from a spec string: "sequential", "fair", "local",
// "random", "ppo:<checkpoint>", or "dqn:<checkpoint>".
std::unique_ptr<Policy> make_policy(const std::string& spec, const RunConfig& cfg);

// CSV/legend name for a policy spec: the part before ':' ("ppo:run/x.json"
// evaluates under the name "ppo").
std::string policy_display_name(const std::string& spec);

struct SweepRequest {
  std::string vary;  // "urllc-mean" or "mmtc-mean"
  std::vector<double> values;
  std::vector<std::string> policies;
};

// {2,5,10,15,20} for "urllc-mean", {10,20,30,40,50,60} for "mmtc-mean".
std::vector<double> default_sweep_values(const std::string& vary);

// Evaluates every policy at every swept arrival mean. Policies are built
// once and reused; normalization bounds stay fixed at the base config's so
// observations remain comparable across the sweep. Values form the outer
// loop, policies the inner. Each row is written to csv_out and flushed as
// soon as it exists.
std::vector<MetricsRow> run_sweep(const RunConfig& base, const SweepRequest& req,
                                  std::ostream& csv_out);

struct TrainReport {
  std::vector<EpisodeStats> curve;  // one entry per training episode
  std::string final_checkpoint_path;
};

// Trains cfg.agent.kind for cfg.run.episodes episodes inside out_dir,
// producing config_resolved.toml, training_curve.csv, periodic
// checkpoint_ep<N>.json files, checkpoint_final.json, and metadata.json.
// command_line is recorded in the metadata only.
TrainReport cmd_train(const RunConfig& cfg, const std::string& out_dir,
                      const std::string& command_line);

// Sidecar for provenance that must stay out of the deterministic outputs:
// wall-clock timestamps, the invoking command, and seed notes.
struct RunMetadata {
  std::string command;
  std::uint64_t seed = 0;
  std::string notes;
  std::time_t started_at = 0;
  std::time_t finished_at = 0;
};

void write_metadata_json(const std::string& path, const RunMetadata& meta);

}  // namespace mecsim
