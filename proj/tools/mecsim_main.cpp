#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mecsim/config.hpp"
#include "mecsim/harness.hpp"
#include "mecsim/svg_plot.hpp"
#include "mecsim/trace_io.hpp"

namespace {

using namespace mecsim;

std::string join_command(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) {
      out += ' ';
    }
    out += argv[i];
  }
  return out;
}

RunConfig load_or_default(const std::string& config_path) {
  return config_path.empty() ? RunConfig{} : load_config(config_path);
}

// Precedence: --seed, then MECSIM_SEED, then the config's run.seed.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& cli_seed, const RunConfig& cfg) {
  if (cli_seed) {
    return *cli_seed;
  }
  if (const char* env = std::getenv("MECSIM_SEED")) {
    const std::string text(env);
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (text.empty() || end == nullptr || *end != '\0' || errno == ERANGE ||
        text.front() == '-') {
      throw std::runtime_error("MECSIM_SEED is not a valid seed: '" + text + "'");
    }
    return static_cast<std::uint64_t>(v);
  }
  return cfg.run.seed;
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

struct TrainArgs {
  std::string config_path;
  std::string agent;
  std::optional<int> episodes;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

int run_train(const TrainArgs& a, const std::string& command) {
  RunConfig cfg = load_or_default(a.config_path);
  cfg.agent.kind = a.agent;
  if (a.episodes) {
    cfg.run.episodes = *a.episodes;
  }
  cfg.run.seed = resolve_seed(a.seed, cfg);
  cfg.run.out_dir = a.out_dir;
  validate_config(cfg);

  const TrainReport report = cmd_train(cfg, a.out_dir, command);
  std::cout << "trained " << cfg.agent.kind << " for " << report.curve.size()
            << " episodes, final checkpoint: " << report.final_checkpoint_path << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string config_path;
  std::string policy;
  std::optional<int> experiments;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string trace_out;
};

int run_evaluate(const EvaluateArgs& a, const std::string& command) {
  RunConfig cfg = load_or_default(a.config_path);
  cfg.run.seed = resolve_seed(a.seed, cfg);
  if (a.experiments) {
    cfg.run.experiments = *a.experiments;
  }
  validate_config(cfg);

  RunMetadata meta;
  meta.command = command;
  meta.seed = cfg.run.seed;
  meta.notes = "episode i is seeded with derive_seed(seed, i)";
  meta.started_at = std::time(nullptr);

  std::ofstream trace_file;
  std::function<void(const EpisodeTrace&)> on_trace;
  if (!a.trace_out.empty()) {
    const std::filesystem::path trace_parent = std::filesystem::path(a.trace_out).parent_path();
    if (!trace_parent.empty()) {
      std::filesystem::create_directories(trace_parent);
    }
    trace_file.open(a.trace_out, std::ios::binary | std::ios::trunc);
    if (!trace_file) {
      throw std::runtime_error("cannot write trace file: " + a.trace_out);
    }
    on_trace = [&trace_file](const EpisodeTrace& t) { trace_file << trace_to_jsonl(t); };
  }

  const std::unique_ptr<Policy> policy = make_policy(a.policy, cfg);
  const MetricsRow row = evaluate_policy(*policy, cfg.env, cfg.run.seed, cfg.run.experiments,
                                         policy_display_name(a.policy), on_trace);

  const std::string csv = metrics_csv_header() + "\n" + metrics_csv_row(row) + "\n";
  std::cout << csv;
  if (!a.out_dir.empty()) {
    std::filesystem::create_directories(a.out_dir);
    write_file((std::filesystem::path(a.out_dir) / "metrics.csv").string(), csv);
    meta.finished_at = std::time(nullptr);
    write_metadata_json((std::filesystem::path(a.out_dir) / "metadata.json").string(), meta);
  }
  return 0;
}

struct SweepArgs {
  std::string config_path;
  std::string vary;
  std::vector<double> values;
  std::vector<std::string> policies;
  std::optional<int> experiments;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

int run_sweep_cmd(const SweepArgs& a, const std::string& command) {
  RunConfig cfg = load_or_default(a.config_path);
  cfg.run.seed = resolve_seed(a.seed, cfg);
  if (a.experiments) {
    cfg.run.experiments = *a.experiments;
  }
  validate_config(cfg);

  SweepRequest req;
  req.vary = a.vary;
  req.values = a.values.empty() ? default_sweep_values(a.vary) : a.values;
  req.policies =
      a.policies.empty() ? std::vector<std::string>{"sequential", "fair", "local"} : a.policies;

  const std::string out_dir = a.out_dir.empty() ? cfg.run.out_dir : a.out_dir;
  std::filesystem::create_directories(out_dir);
  const std::string csv_path = (std::filesystem::path(out_dir) / "metrics.csv").string();
  std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
  if (!csv) {
    throw std::runtime_error("cannot write metrics file: " + csv_path);
  }

  RunMetadata meta;
  meta.command = command;
  meta.seed = cfg.run.seed;
  meta.notes = "every (value, policy) cell replays the same derive_seed(seed, i) episodes";
  meta.started_at = std::time(nullptr);

  const std::vector<MetricsRow> rows = run_sweep(cfg, req, csv);
  meta.finished_at = std::time(nullptr);
  write_metadata_json((std::filesystem::path(out_dir) / "metadata.json").string(), meta);

  std::cout << metrics_csv_header() << "\n";
  for (const MetricsRow& row : rows) {
    std::cout << metrics_csv_row(row) << "\n";
  }
  std::cout << "wrote " << csv_path << "\n";
  return 0;
}

struct PlotArgs {
  std::string input;
  std::string out_dir;
};

int run_plot(const PlotArgs& a) {
  const std::vector<std::string> written = render_plots(read_file(a.input), a.out_dir);
  for (const std::string& path : written) {
    std::cout << "wrote " << path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"5G MEC slice offloading simulator"};
  app.require_subcommand(1);
  const std::string command = join_command(argc, argv);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "Train an agent and write checkpoints");
  train->add_option("--config", train_args.config_path, "TOML config path");
  train->add_option("--agent", train_args.agent, "Agent kind")
      ->required()
      ->check(CLI::IsMember({"ppo", "dqn"}));
  train->add_option("--episodes", train_args.episodes, "Training episode count");
  train->add_option("--seed", train_args.seed, "Master seed");
  train->add_option("--out", train_args.out_dir, "Output directory")->required();

  EvaluateArgs eval_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate one policy");
  evaluate->add_option("--config", eval_args.config_path, "TOML config path");
  evaluate
      ->add_option("--policy", eval_args.policy,
                   "sequential, fair, local, random, ppo:<ckpt>, or dqn:<ckpt>")
      ->required();
  evaluate->add_option("--experiments", eval_args.experiments, "Evaluation episode count");
  evaluate->add_option("--seed", eval_args.seed, "Master seed");
  evaluate->add_option("--out", eval_args.out_dir, "Directory for metrics.csv and metadata");
  evaluate->add_option("--trace-out", eval_args.trace_out, "JSONL file for full step traces");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "Evaluate policies across arrival means");
  sweep->add_option("--config", sweep_args.config_path, "TOML config path");
  sweep->add_option("--vary", sweep_args.vary, "Swept arrival mean")
      ->required()
      ->check(CLI::IsMember({"urllc-mean", "mmtc-mean"}));
  sweep->add_option("--values", sweep_args.values, "Swept values")->delimiter(',');
  sweep->add_option("--policies", sweep_args.policies, "Policy specs")->delimiter(',');
  sweep->add_option("--experiments", sweep_args.experiments, "Episodes per cell");
  sweep->add_option("--seed", sweep_args.seed, "Master seed");
  sweep->add_option("--out", sweep_args.out_dir, "Output directory (default: config out_dir)");

  PlotArgs plot_args;
  CLI::App* plot = app.add_subcommand("plot", "Render SVG charts from a metrics CSV");
  plot->add_option("--input", plot_args.input, "metrics.csv path")->required();
  plot->add_option("--out", plot_args.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
    if (train->parsed()) {
      return run_train(train_args, command);
    }
    if (evaluate->parsed()) {
      return run_evaluate(eval_args, command);
    }
    if (sweep->parsed()) {
      return run_sweep_cmd(sweep_args, command);
    }
    if (plot->parsed()) {
      return run_plot(plot_args);
    }
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
