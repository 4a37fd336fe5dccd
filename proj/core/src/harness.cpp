#include "mecsim/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mecsim/rng.hpp"

namespace mecsim {

namespace {

// Seed stream tags, kept far above any plausible episode index so the
// per-episode seeds derive_seed(master, i) can never collide with them.
constexpr std::uint64_t kAgentInitTag = std::uint64_t{1} << 40;
constexpr std::uint64_t kUpdateStreamTag = (std::uint64_t{1} << 40) + 1;

constexpr int kObsDim = static_cast<int>(std::tuple_size<Observation>::value);

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path);
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

std::string iso8601_utc(std::time_t t) {
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Epsilon-greedy exploration over the online Q network for one episode.
class ExplorationShim final : public Policy {
public:
  ExplorationShim(const DqnAgent& agent, double epsilon) : agent_(agent), epsilon_(epsilon) {}

  int act(const StepContext& ctx, Rng& rng) override {
    return dqn_act(agent_.online(), ctx.obs, ctx.mask, epsilon_, rng);
  }
  bool deterministic() const override { return false; }

private:
  const DqnAgent& agent_;
  double epsilon_;
};

void append_curve_row(std::ostream& os, int episode, const EpisodeStats& stats) {
  const double mean =
      stats.steps > 0 ? stats.reward_sum / static_cast<double>(stats.steps) : 0.0;
  os << episode << ',' << stats.steps << ',' << fmt_double(stats.reward_sum) << ','
     << fmt_double(mean) << '\n';
  os.flush();
}

}  // namespace

std::string metrics_csv_header() {
  return "sweep_var,sweep_value,policy,experiments,total_time_pct,mmtc_energy_pct,"
         "urllc_time_pct,mean_episode_reward,urllc_acceptance_rate,mmtc_acceptance_rate";
}

std::string metrics_csv_row(const MetricsRow& row) {
  std::ostringstream os;
  os << row.sweep_var << ',' << fmt_double(row.sweep_value) << ',' << row.policy << ','
     << row.experiments << ',' << fmt_double(row.total_time_pct) << ','
     << fmt_double(row.mmtc_energy_pct) << ',' << fmt_double(row.urllc_time_pct) << ','
     << fmt_double(row.mean_episode_reward) << ',' << fmt_double(row.urllc_acceptance_rate)
     << ',' << fmt_double(row.mmtc_acceptance_rate);
  return std::move(os).str();
}

MetricsRow evaluate_policy(Policy& policy, const EnvConfig& env, std::uint64_t master_seed,
                           int experiments, const std::string& name,
                           const std::function<void(const EpisodeTrace&)>& on_trace) {
  if (experiments < 1) {
    throw std::invalid_argument("evaluate_policy: experiments must be >= 1");
  }
  MetricsAccumulator acc;
  for (int i = 0; i < experiments; ++i) {
    const EpisodeTrace trace =
        run_episode(policy, derive_seed(master_seed, static_cast<std::uint64_t>(i)), env);
    acc.add(trace);
    if (on_trace) {
      on_trace(trace);
    }
  }
  const RoundMetrics m = acc.finalize();
  MetricsRow row;
  row.policy = name;
  row.experiments = experiments;
  row.total_time_pct = m.total_time_pct;
  row.mmtc_energy_pct = m.mmtc_energy_pct;
  row.urllc_time_pct = m.urllc_time_pct;
  row.mean_episode_reward = acc.mean_episode_reward();
  row.urllc_acceptance_rate =
      static_cast<double>(m.urllc_accepted) / static_cast<double>(m.urllc_tasks);
  row.mmtc_acceptance_rate =
      static_cast<double>(m.mmtc_accepted) / static_cast<double>(m.mmtc_tasks);
  return row;
}

std::string policy_display_name(const std::string& spec) {
  const std::size_t colon = spec.find(':');
  return colon == std::string::npos ? spec : spec.substr(0, colon);
}

std::unique_ptr<Policy> make_policy(const std::string& spec, const RunConfig& cfg) {
  (void)cfg;
  if (spec == "sequential") {
    return std::make_unique<SequentialBaseline>();
  }
  if (spec == "fair") {
    return std::make_unique<FairBaseline>();
  }
  if (spec == "local") {
    return std::make_unique<LocalOnlyBaseline>();
  }
  if (spec == "random") {
    return std::make_unique<RandomPolicy>();
  }
  const std::size_t colon = spec.find(':');
  if (colon != std::string::npos) {
    const std::string kind = spec.substr(0, colon);
    const std::string path = spec.substr(colon + 1);
    if (path.empty()) {
      throw std::runtime_error("policy spec '" + spec + "' is missing a checkpoint path");
    }
    if (kind == "ppo") {
      return PpoAgent::from_checkpoint_string(read_file(path));
    }
    if (kind == "dqn") {
      return DqnAgent::from_checkpoint_string(read_file(path));
    }
  }
  throw std::runtime_error(
      "unknown policy spec '" + spec +
      "' (expected sequential, fair, local, random, ppo:<ckpt>, or dqn:<ckpt>)");
}

std::vector<double> default_sweep_values(const std::string& vary) {
  if (vary == "urllc-mean") {
    return {2.0, 5.0, 10.0, 15.0, 20.0};
  }
  if (vary == "mmtc-mean") {
    return {10.0, 20.0, 30.0, 40.0, 50.0, 60.0};
  }
  throw std::runtime_error("unknown sweep variable '" + vary +
                           "' (expected urllc-mean or mmtc-mean)");
}

std::vector<MetricsRow> run_sweep(const RunConfig& base, const SweepRequest& req,
                                  std::ostream& csv_out) {
  if (req.values.empty()) {
    throw std::runtime_error("sweep has no values");
  }
  if (req.policies.empty()) {
    throw std::runtime_error("sweep has no policies");
  }
  const bool vary_urllc = req.vary == "urllc-mean";
  if (!vary_urllc && req.vary != "mmtc-mean") {
    throw std::runtime_error("unknown sweep variable '" + req.vary + "'");
  }

  std::vector<std::unique_ptr<Policy>> policies;
  policies.reserve(req.policies.size());
  for (const std::string& spec : req.policies) {
    policies.push_back(make_policy(spec, base));
  }

  csv_out << metrics_csv_header() << '\n';
  csv_out.flush();

  std::vector<MetricsRow> rows;
  for (double value : req.values) {
    EnvConfig env = base.env;  // bounds stay at the base derivation
    if (vary_urllc) {
      env.urllc.count_mean = value;
    } else {
      env.mmtc.count_mean = value;
    }
    for (std::size_t p = 0; p < policies.size(); ++p) {
      MetricsRow row =
          evaluate_policy(*policies[p], env, base.run.seed, base.run.experiments,
                          policy_display_name(req.policies[p]));
      row.sweep_var = req.vary;
      row.sweep_value = value;
      csv_out << metrics_csv_row(row) << '\n';
      csv_out.flush();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

TrainReport cmd_train(const RunConfig& cfg, const std::string& out_dir,
                      const std::string& command_line) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto path_in = [&out_dir](const std::string& name) {
    return (fs::path(out_dir) / name).string();
  };

  RunMetadata meta;
  meta.command = command_line;
  meta.seed = cfg.run.seed;
  meta.notes = "episode i is seeded with derive_seed(seed, i); evaluation reuses the same "
               "per-index stream so policies can be compared on identical rounds";
  meta.started_at = std::time(nullptr);

  write_file(path_in("config_resolved.toml"), save_config(cfg));

  std::ofstream curve_csv(path_in("training_curve.csv"), std::ios::binary | std::ios::trunc);
  if (!curve_csv) {
    throw std::runtime_error("cannot write training_curve.csv in " + out_dir);
  }
  curve_csv << "episode,steps,reward_sum,reward_mean\n";
  curve_csv.flush();

  const std::uint64_t master = cfg.run.seed;
  const int total = cfg.run.episodes;
  const int interval = cfg.run.checkpoint_interval;
  const int n_actions = cfg.env.menu.size();

  TrainReport report;
  report.curve.reserve(static_cast<std::size_t>(total));
  const EpisodeCallback on_episode = [&](int episode_index, const EpisodeStats& stats) {
    append_curve_row(curve_csv, episode_index, stats);
    report.curve.push_back(stats);
  };

  Rng update_rng(derive_seed(master, kUpdateStreamTag));
  int next_mark = interval;

  if (cfg.agent.kind == "ppo") {
    PpoAgent agent(cfg.agent.ppo, kObsDim, n_actions, derive_seed(master, kAgentInitTag));
    RolloutBuffer buf;
    int done = 0;
    while (done < total) {
      const int n = std::min(cfg.agent.ppo.episodes_per_rollout, total - done);
      buf.clear();
      agent.collect_rollouts(cfg.env, master, done, n, buf, on_episode);
      if (buf.size() > 0) {
        agent.update(buf, update_rng);
      }
      done += n;
      if (done >= next_mark) {
        write_file(path_in("checkpoint_ep" + std::to_string(done) + ".json"),
                   agent.checkpoint_string());
        next_mark = (done / interval + 1) * interval;
      }
    }
    report.final_checkpoint_path = path_in("checkpoint_final.json");
    write_file(report.final_checkpoint_path, agent.checkpoint_string());
  } else if (cfg.agent.kind == "dqn") {
    DqnAgent agent(cfg.agent.dqn, kObsDim, n_actions, derive_seed(master, kAgentInitTag));
    for (int e = 0; e < total; ++e) {
      ExplorationShim shim(agent, agent.epsilon_at(e));
      const EpisodeTrace trace =
          run_episode(shim, derive_seed(master, static_cast<std::uint64_t>(e)), cfg.env);
      const std::vector<TraceStep>& steps = trace.steps;
      EpisodeStats stats;
      stats.steps = static_cast<int>(steps.size());
      for (std::size_t i = 0; i < steps.size(); ++i) {
        stats.reward_sum += steps[i].reward;
        Transition t;
        t.obs = steps[i].obs;
        t.action = steps[i].action_index;
        t.reward = steps[i].reward;
        if (i + 1 < steps.size()) {
          t.next_obs = steps[i + 1].obs;
          t.next_mask = steps[i + 1].mask;
          t.done = 0;
        } else {
          t.next_obs = Observation{};
          t.next_mask = ActionMask(static_cast<std::size_t>(n_actions), 1);
          t.done = 1;
        }
        agent.store(t);
      }
      for (std::size_t i = 0; i < steps.size(); ++i) {
        if (agent.can_update()) {
          agent.update(update_rng);
        }
      }
      on_episode(e, stats);
      if (e + 1 >= next_mark) {
        write_file(path_in("checkpoint_ep" + std::to_string(e + 1) + ".json"),
                   agent.checkpoint_string());
        next_mark = ((e + 1) / interval + 1) * interval;
      }
    }
    report.final_checkpoint_path = path_in("checkpoint_final.json");
    write_file(report.final_checkpoint_path, agent.checkpoint_string());
  } else {
    throw std::runtime_error("unknown agent kind '" + cfg.agent.kind + "'");
  }

  meta.finished_at = std::time(nullptr);
  write_metadata_json(path_in("metadata.json"), meta);
  return report;
}

void write_metadata_json(const std::string& path, const RunMetadata& meta) {
  nlohmann::ordered_json j;
  j["command"] = meta.command;
  j["seed"] = meta.seed;
  j["notes"] = meta.notes;
  j["started_at"] = iso8601_utc(meta.started_at);
  j["finished_at"] = iso8601_utc(meta.finished_at);
  write_file(path, j.dump(2) + "\n");
}

}  // namespace mecsim
