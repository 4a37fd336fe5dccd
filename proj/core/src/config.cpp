#include "mecsim/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mecsim/toml.hpp"

namespace mecsim {

namespace {

[[noreturn]] void invalid(const std::string& key, const std::string& what) {
  throw std::runtime_error("invalid config: " + key + " " + what);
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) {
    invalid(key, what);
  }
}

int to_int(const toml::Value& v) {
  const std::int64_t x = v.as_integer();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw std::runtime_error("integer out of range (line " + std::to_string(v.line()) + ")");
  }
  return static_cast<int>(x);
}

std::vector<int> to_int_list(const toml::Value& v) {
  std::vector<int> out;
  out.reserve(v.as_array().size());
  for (const toml::Value& e : v.as_array()) {
    out.push_back(to_int(e));
  }
  return out;
}

// Reads config keys out of a parsed document, consuming each key it serves
// so leftovers can be reported as unknown.
class Reader {
public:
  explicit Reader(toml::Document doc, std::string origin)
      : doc_(std::move(doc)), origin_(std::move(origin)) {}

  void number(const std::string& key, double& field) {
    if (const toml::Value* v = take(key)) {
      field = v->as_number();
    }
  }

  void integer(const std::string& key, int& field) {
    if (const toml::Value* v = take(key)) {
      field = to_int(*v);
    }
  }

  void seed(const std::string& key, std::uint64_t& field) {
    if (const toml::Value* v = take(key)) {
      const std::int64_t x = v->as_integer();
      if (x < 0) {
        throw std::runtime_error(origin_ + ":" + std::to_string(v->line()) + ": " + key +
                                 " must be non-negative");
      }
      field = static_cast<std::uint64_t>(x);
    }
  }

  void text(const std::string& key, std::string& field) {
    if (const toml::Value* v = take(key)) {
      field = v->as_string();
    }
  }

  void int_list(const std::string& key, std::vector<int>& field) {
    if (const toml::Value* v = take(key)) {
      field = to_int_list(*v);
    }
  }

  // Optional deadline: absent key leaves the field alone; an explicit 0
  // clears it.
  void deadline(const std::string& key, std::optional<double>& field) {
    if (const toml::Value* v = take(key)) {
      const double d = v->as_number();
      field = d == 0.0 ? std::optional<double>{} : std::optional<double>{d};
    }
  }

  void finish() const {
    if (doc_.empty()) {
      return;
    }
    const auto first = std::min_element(
        doc_.begin(), doc_.end(),
        [](const auto& a, const auto& b) { return a.second.line() < b.second.line(); });
    throw std::runtime_error(origin_ + ":" + std::to_string(first->second.line()) +
                             ": unknown key '" + first->first + "'");
  }

private:
  const toml::Value* take(const std::string& key) {
    const auto it = doc_.find(key);
    if (it == doc_.end()) {
      return nullptr;
    }
    scratch_ = std::move(it->second);
    doc_.erase(it);
    return &scratch_;
  }

  toml::Document doc_;
  std::string origin_;
  toml::Value scratch_;
};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string fmt_int_list(const std::vector<int>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) {
      out += ", ";
    }
    out += std::to_string(v[i]);
  }
  out += "]";
  return out;
}

void write_slice(std::ostringstream& os, const char* name, const SliceArrivalConfig& s) {
  os << "[slice." << name << "]\n";
  os << "count_mean = " << fmt_double(s.count_mean) << "\n";
  os << "count_variance = " << fmt_double(s.count_variance) << "\n";
  os << "bytes_min = " << fmt_double(s.bytes_min) << "\n";
  os << "bytes_max = " << fmt_double(s.bytes_max) << "\n";
  os << "cycles_min = " << fmt_double(s.cycles_min) << "\n";
  os << "cycles_max = " << fmt_double(s.cycles_max) << "\n";
  os << "deadline = " << fmt_double(s.deadline.value_or(0.0)) << "\n";
  os << "local_cpu_freq = " << fmt_double(s.local_cpu_freq) << "\n";
  os << "tx_power = " << fmt_double(s.tx_power) << "\n";
  os << "local_process_power = " << fmt_double(s.local_process_power) << "\n";
  os << "\n";
}

void validate_radio(const RadioParams& radio) {
  require(radio.rb_bandwidth > 0.0, "radio.rb_bandwidth", "must be positive");
  require(radio.path_loss_exp > 0.0, "radio.path_loss_exp", "must be positive");
  require(radio.noise_variance > 0.0, "radio.noise_variance", "must be positive");
}

void validate_slice(const std::string& prefix, const SliceArrivalConfig& s) {
  require(s.count_mean >= 0.0, prefix + ".count_mean", "must be non-negative");
  require(s.count_variance >= 0.0, prefix + ".count_variance", "must be non-negative");
  require(s.bytes_min > 0.0, prefix + ".bytes_min", "must be positive");
  require(s.bytes_max >= s.bytes_min, prefix + ".bytes_max", "must be >= bytes_min");
  require(s.cycles_min > 0.0, prefix + ".cycles_min", "must be positive");
  require(s.cycles_max >= s.cycles_min, prefix + ".cycles_max", "must be >= cycles_min");
  if (s.deadline) {
    require(*s.deadline > 0.0, prefix + ".deadline", "must be positive when set");
  }
  require(s.local_cpu_freq > 0.0, prefix + ".local_cpu_freq", "must be positive");
  require(s.tx_power > 0.0, prefix + ".tx_power", "must be positive");
  require(s.local_process_power > 0.0, prefix + ".local_process_power", "must be positive");
}

void validate_hidden(const std::string& key, const std::vector<int>& dims) {
  require(!dims.empty(), key, "must list at least one layer width");
  for (int d : dims) {
    require(d >= 1, key, "widths must be >= 1");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  Reader r(toml::parse(text, origin), origin);
  RunConfig cfg;

  r.number("radio.rb_bandwidth", cfg.env.radio.rb_bandwidth);
  r.number("radio.path_loss_exp", cfg.env.radio.path_loss_exp);
  r.number("radio.noise_variance", cfg.env.radio.noise_variance);

  r.number("mec.unit_freq", cfg.env.mec.unit_freq);
  r.integer("mec.total_comp_units", cfg.env.mec.total_comp_units);
  r.integer("mec.total_comm_rbs", cfg.env.mec.total_comm_rbs);

  r.number("area.width", cfg.env.area.width);
  r.number("area.height", cfg.env.area.height);

  const auto read_slice = [&r](const std::string& prefix, SliceArrivalConfig& s) {
    r.number(prefix + ".count_mean", s.count_mean);
    r.number(prefix + ".count_variance", s.count_variance);
    r.number(prefix + ".bytes_min", s.bytes_min);
    r.number(prefix + ".bytes_max", s.bytes_max);
    r.number(prefix + ".cycles_min", s.cycles_min);
    r.number(prefix + ".cycles_max", s.cycles_max);
    r.deadline(prefix + ".deadline", s.deadline);
    r.number(prefix + ".local_cpu_freq", s.local_cpu_freq);
    r.number(prefix + ".tx_power", s.tx_power);
    r.number(prefix + ".local_process_power", s.local_process_power);
  };
  read_slice("slice.urllc", cfg.env.urllc);
  read_slice("slice.mmtc", cfg.env.mmtc);

  r.int_list("menu.comm_options", cfg.env.menu.comm_options);
  r.int_list("menu.comp_options", cfg.env.menu.comp_options);

  // Bounds follow the (possibly overridden) environment; explicit keys then
  // replace individual components. The derivation evaluates a channel
  // capacity, so its inputs must be sane before validate_config gets a say.
  validate_radio(cfg.env.radio);
  validate_slice("slice.urllc", cfg.env.urllc);
  validate_slice("slice.mmtc", cfg.env.mmtc);
  cfg.env.bounds = NormalizationBounds::derived(cfg.env.radio, cfg.env.urllc, cfg.env.mmtc);
  r.number("normalization.bytes_max", cfg.env.bounds.bytes_max);
  r.number("normalization.cycles_max", cfg.env.bounds.cycles_max);
  r.number("normalization.deadline_max", cfg.env.bounds.deadline_max);
  r.number("normalization.capacity_max", cfg.env.bounds.capacity_max);
  r.number("normalization.local_freq_max", cfg.env.bounds.local_freq_max);

  r.number("reward.alpha", cfg.env.weights.alpha);
  r.number("reward.beta", cfg.env.weights.beta);
  r.number("reward.delta", cfg.env.weights.delta);
  r.number("reward.slice_weight_urllc", cfg.env.weights.slice_weight_urllc);
  r.number("reward.slice_weight_mmtc", cfg.env.weights.slice_weight_mmtc);
  r.number("reward.discount", cfg.env.weights.discount);

  r.text("agent.kind", cfg.agent.kind);

  r.number("ppo.clip_epsilon", cfg.agent.ppo.clip_epsilon);
  r.number("ppo.gae_lambda", cfg.agent.ppo.gae_lambda);
  r.integer("ppo.epochs_per_update", cfg.agent.ppo.epochs_per_update);
  r.integer("ppo.episodes_per_rollout", cfg.agent.ppo.episodes_per_rollout);
  r.integer("ppo.batch_size", cfg.agent.ppo.batch_size);
  r.number("ppo.value_loss_coeff", cfg.agent.ppo.value_loss_coeff);
  r.number("ppo.entropy_coeff", cfg.agent.ppo.entropy_coeff);
  r.number("ppo.learning_rate", cfg.agent.ppo.learning_rate);
  r.number("ppo.discount", cfg.agent.ppo.discount);
  r.int_list("ppo.hidden_dims", cfg.agent.ppo.hidden_dims);

  r.integer("dqn.replay_capacity", cfg.agent.dqn.replay_capacity);
  r.integer("dqn.target_sync_interval", cfg.agent.dqn.target_sync_interval);
  r.number("dqn.epsilon_start", cfg.agent.dqn.epsilon_start);
  r.number("dqn.epsilon_end", cfg.agent.dqn.epsilon_end);
  r.integer("dqn.epsilon_decay_episodes", cfg.agent.dqn.epsilon_decay_episodes);
  r.integer("dqn.batch_size", cfg.agent.dqn.batch_size);
  r.number("dqn.learning_rate", cfg.agent.dqn.learning_rate);
  r.number("dqn.discount", cfg.agent.dqn.discount);
  r.int_list("dqn.hidden_dims", cfg.agent.dqn.hidden_dims);

  r.seed("run.seed", cfg.run.seed);
  r.integer("run.episodes", cfg.run.episodes);
  r.integer("run.experiments", cfg.run.experiments);
  r.text("run.out_dir", cfg.run.out_dir);
  r.integer("run.checkpoint_interval", cfg.run.checkpoint_interval);

  r.finish();
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string save_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "[radio]\n";
  os << "rb_bandwidth = " << fmt_double(cfg.env.radio.rb_bandwidth) << "\n";
  os << "path_loss_exp = " << fmt_double(cfg.env.radio.path_loss_exp) << "\n";
  os << "noise_variance = " << fmt_double(cfg.env.radio.noise_variance) << "\n\n";

  os << "[mec]\n";
  os << "unit_freq = " << fmt_double(cfg.env.mec.unit_freq) << "\n";
  os << "total_comp_units = " << cfg.env.mec.total_comp_units << "\n";
  os << "total_comm_rbs = " << cfg.env.mec.total_comm_rbs << "\n\n";

  os << "[area]\n";
  os << "width = " << fmt_double(cfg.env.area.width) << "\n";
  os << "height = " << fmt_double(cfg.env.area.height) << "\n\n";

  write_slice(os, "urllc", cfg.env.urllc);
  write_slice(os, "mmtc", cfg.env.mmtc);

  os << "[menu]\n";
  os << "comm_options = " << fmt_int_list(cfg.env.menu.comm_options) << "\n";
  os << "comp_options = " << fmt_int_list(cfg.env.menu.comp_options) << "\n\n";

  os << "[normalization]\n";
  os << "bytes_max = " << fmt_double(cfg.env.bounds.bytes_max) << "\n";
  os << "cycles_max = " << fmt_double(cfg.env.bounds.cycles_max) << "\n";
  os << "deadline_max = " << fmt_double(cfg.env.bounds.deadline_max) << "\n";
  os << "capacity_max = " << fmt_double(cfg.env.bounds.capacity_max) << "\n";
  os << "local_freq_max = " << fmt_double(cfg.env.bounds.local_freq_max) << "\n\n";

  os << "[reward]\n";
  os << "alpha = " << fmt_double(cfg.env.weights.alpha) << "\n";
  os << "beta = " << fmt_double(cfg.env.weights.beta) << "\n";
  os << "delta = " << fmt_double(cfg.env.weights.delta) << "\n";
  os << "slice_weight_urllc = " << fmt_double(cfg.env.weights.slice_weight_urllc) << "\n";
  os << "slice_weight_mmtc = " << fmt_double(cfg.env.weights.slice_weight_mmtc) << "\n";
  os << "discount = " << fmt_double(cfg.env.weights.discount) << "\n\n";

  os << "[agent]\n";
  os << "kind = " << fmt_string(cfg.agent.kind) << "\n\n";

  os << "[ppo]\n";
  os << "clip_epsilon = " << fmt_double(cfg.agent.ppo.clip_epsilon) << "\n";
  os << "gae_lambda = " << fmt_double(cfg.agent.ppo.gae_lambda) << "\n";
  os << "epochs_per_update = " << cfg.agent.ppo.epochs_per_update << "\n";
  os << "episodes_per_rollout = " << cfg.agent.ppo.episodes_per_rollout << "\n";
  os << "batch_size = " << cfg.agent.ppo.batch_size << "\n";
  os << "value_loss_coeff = " << fmt_double(cfg.agent.ppo.value_loss_coeff) << "\n";
  os << "entropy_coeff = " << fmt_double(cfg.agent.ppo.entropy_coeff) << "\n";
  os << "learning_rate = " << fmt_double(cfg.agent.ppo.learning_rate) << "\n";
  os << "discount = " << fmt_double(cfg.agent.ppo.discount) << "\n";
  os << "hidden_dims = " << fmt_int_list(cfg.agent.ppo.hidden_dims) << "\n\n";

  os << "[dqn]\n";
  os << "replay_capacity = " << cfg.agent.dqn.replay_capacity << "\n";
  os << "target_sync_interval = " << cfg.agent.dqn.target_sync_interval << "\n";
  os << "epsilon_start = " << fmt_double(cfg.agent.dqn.epsilon_start) << "\n";
  os << "epsilon_end = " << fmt_double(cfg.agent.dqn.epsilon_end) << "\n";
  os << "epsilon_decay_episodes = " << cfg.agent.dqn.epsilon_decay_episodes << "\n";
  os << "batch_size = " << cfg.agent.dqn.batch_size << "\n";
  os << "learning_rate = " << fmt_double(cfg.agent.dqn.learning_rate) << "\n";
  os << "discount = " << fmt_double(cfg.agent.dqn.discount) << "\n";
  os << "hidden_dims = " << fmt_int_list(cfg.agent.dqn.hidden_dims) << "\n\n";

  os << "[run]\n";
  os << "seed = " << cfg.run.seed << "\n";
  os << "episodes = " << cfg.run.episodes << "\n";
  os << "experiments = " << cfg.run.experiments << "\n";
  os << "out_dir = " << fmt_string(cfg.run.out_dir) << "\n";
  os << "checkpoint_interval = " << cfg.run.checkpoint_interval << "\n";
  return std::move(os).str();
}

void validate_config(const RunConfig& cfg) {
  validate_radio(cfg.env.radio);

  require(cfg.env.mec.unit_freq > 0.0, "mec.unit_freq", "must be positive");
  require(cfg.env.mec.total_comp_units > 0, "mec.total_comp_units", "must be positive");
  require(cfg.env.mec.total_comm_rbs > 0, "mec.total_comm_rbs", "must be positive");

  require(cfg.env.area.width > 0.0, "area.width", "must be positive");
  require(cfg.env.area.height > 0.0, "area.height", "must be positive");

  validate_slice("slice.urllc", cfg.env.urllc);
  validate_slice("slice.mmtc", cfg.env.mmtc);

  try {
    cfg.env.menu.validate();
  } catch (const std::exception& e) {
    invalid("menu", e.what());
  }
  require(cfg.env.menu.comm_options.back() <= cfg.env.mec.total_comm_rbs,
          "menu.comm_options", "largest option exceeds mec.total_comm_rbs");
  require(cfg.env.menu.comp_options.back() <= cfg.env.mec.total_comp_units,
          "menu.comp_options", "largest option exceeds mec.total_comp_units");

  require(cfg.env.bounds.bytes_max > 0.0, "normalization.bytes_max", "must be positive");
  require(cfg.env.bounds.cycles_max > 0.0, "normalization.cycles_max", "must be positive");
  require(cfg.env.bounds.deadline_max > 0.0, "normalization.deadline_max", "must be positive");
  require(cfg.env.bounds.capacity_max > 0.0, "normalization.capacity_max", "must be positive");
  require(cfg.env.bounds.local_freq_max > 0.0, "normalization.local_freq_max",
          "must be positive");

  require(cfg.env.weights.alpha >= 0.0, "reward.alpha", "must be non-negative");
  require(cfg.env.weights.beta >= 0.0, "reward.beta", "must be non-negative");
  require(cfg.env.weights.delta > 0.0, "reward.delta", "must be positive");
  require(cfg.env.weights.slice_weight_urllc > 0.0, "reward.slice_weight_urllc",
          "must be positive");
  require(cfg.env.weights.slice_weight_mmtc > 0.0, "reward.slice_weight_mmtc",
          "must be positive");
  require(cfg.env.weights.discount > 0.0 && cfg.env.weights.discount <= 1.0, "reward.discount",
          "must lie in (0, 1]");

  require(cfg.agent.kind == "ppo" || cfg.agent.kind == "dqn", "agent.kind",
          "must be \"ppo\" or \"dqn\"");

  const PpoConfig& p = cfg.agent.ppo;
  require(p.clip_epsilon > 0.0 && p.clip_epsilon < 1.0, "ppo.clip_epsilon",
          "must lie in (0, 1)");
  require(p.gae_lambda >= 0.0 && p.gae_lambda <= 1.0, "ppo.gae_lambda", "must lie in [0, 1]");
  require(p.epochs_per_update >= 1, "ppo.epochs_per_update", "must be >= 1");
  require(p.episodes_per_rollout >= 1, "ppo.episodes_per_rollout", "must be >= 1");
  require(p.batch_size >= 1, "ppo.batch_size", "must be >= 1");
  require(p.value_loss_coeff >= 0.0, "ppo.value_loss_coeff", "must be non-negative");
  require(p.entropy_coeff >= 0.0, "ppo.entropy_coeff", "must be non-negative");
  require(p.learning_rate > 0.0, "ppo.learning_rate", "must be positive");
  require(p.discount > 0.0 && p.discount <= 1.0, "ppo.discount", "must lie in (0, 1]");
  validate_hidden("ppo.hidden_dims", p.hidden_dims);

  const DqnConfig& d = cfg.agent.dqn;
  require(d.batch_size >= 1, "dqn.batch_size", "must be >= 1");
  require(d.replay_capacity >= d.batch_size, "dqn.replay_capacity", "must be >= batch_size");
  require(d.target_sync_interval >= 1, "dqn.target_sync_interval", "must be >= 1");
  require(d.epsilon_start >= 0.0 && d.epsilon_start <= 1.0, "dqn.epsilon_start",
          "must lie in [0, 1]");
  require(d.epsilon_end >= 0.0 && d.epsilon_end <= d.epsilon_start, "dqn.epsilon_end",
          "must lie in [0, epsilon_start]");
  require(d.epsilon_decay_episodes >= 1, "dqn.epsilon_decay_episodes", "must be >= 1");
  require(d.learning_rate > 0.0, "dqn.learning_rate", "must be positive");
  require(d.discount > 0.0 && d.discount <= 1.0, "dqn.discount", "must lie in (0, 1]");
  validate_hidden("dqn.hidden_dims", d.hidden_dims);

  require(cfg.run.episodes >= 0, "run.episodes", "must be non-negative");
  require(cfg.run.experiments >= 1, "run.experiments", "must be >= 1");
  require(!cfg.run.out_dir.empty(), "run.out_dir", "must not be empty");
  require(cfg.run.checkpoint_interval >= 1, "run.checkpoint_interval", "must be >= 1");
}

}  // namespace mecsim
