// Acceptance gate for the simulator. Each numbered criterion prints one
// [PASS]/[FAIL] line; the process exit code is the number of failures.
//
// Budget-heavy criteria use desk-scale sizes. The PPO criterion first trains
// each seed for a quick pass (default 2000 episodes, override with
// MECSIM_ACCEPT_PPO_EPISODES, capped at 15000); any seed that misses the
// metric margins is retrained at the full 15000 episodes and that run's
// result decides.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mecsim/agents.hpp"
#include "mecsim/config.hpp"
#include "mecsim/env_model.hpp"
#include "mecsim/episode.hpp"
#include "mecsim/harness.hpp"
#include "mecsim/reward.hpp"
#include "mecsim/rng.hpp"

using namespace mecsim;
namespace fs = std::filesystem;

namespace {

struct Checker {
  int checks = 0;
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void note(std::string what) { notes.push_back(std::move(what)); }

  void expect(bool ok, const std::string& what) {
    checks += 1;
    if (!ok) {
      failures.push_back(what);
    }
  }

  void expect_rel(double actual, double expected, double tol, const std::string& what) {
    const double err = std::abs(actual - expected) / std::max(1.0, std::abs(expected));
    std::ostringstream os;
    os << what << ": got " << actual << ", want " << expected << " (rel err " << err << ")";
    expect(err <= tol, os.str());
  }
};

std::string fmt_seconds(double s) {
  std::ostringstream os;
  os.precision(3);
  os << s << " s";
  return os.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mecsim_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return std::move(os).str();
}

// ---------------------------------------------------------------------------
// 1. Formula unit suite: the worked env-model and reward examples, 1e-9 rel.

void criterion_formulas(Checker& c) {
  const double kTol = 1e-9;

  RadioParams radio;
  radio.rb_bandwidth = 4e6;
  radio.path_loss_exp = 2.8;
  radio.noise_variance = 1e-13;
  radio.channel_gain = 1.0;

  UserEquipment ue;
  ue.distance = 1000.0;
  ue.tx_power = 0.2;
  ue.local_cpu_freq = 6e8;
  ue.local_process_power = 0.4;

  c.expect(channel_capacity(0, radio, ue) == 0.0, "capacity with zero RBs");
  {
    UserEquipment silent = ue;
    silent.tx_power = 0.0;
    c.expect(channel_capacity(1, radio, silent) == 0.0, "capacity with zero tx power");
  }
  const double cap1 = channel_capacity(1, radio, ue);
  c.expect_rel(cap1, 51836489.298087485, kTol, "single-RB capacity");

  Task task;
  task.bytes = 2e6;
  task.cycles = 1.8e8;
  task.deadline = 0.7;
  task.slice = SliceId::Urllc;

  {
    Task empty = task;
    empty.bytes = 0.0;
    c.expect(transmission_delay(empty, 1.6e7) == 0.0, "delay of empty payload");
  }
  c.expect_rel(transmission_delay(task, 1.6e7), 1.0, kTol, "delay at 16 Mbit/s");
  const double t_trans = transmission_delay(task, cap1);
  c.expect_rel(t_trans, 0.30866287853699848, kTol, "delay at single-RB capacity");

  MecParams mec;
  mec.unit_freq = 2e8;
  c.expect(mec_equiv_frequency(0, mec) == 0.0, "zero computation units");
  c.expect_rel(mec_equiv_frequency(1, mec), 2e8, kTol, "one computation unit");
  c.expect_rel(mec_equiv_frequency(10, mec), 2e9, kTol, "ten computation units");

  c.expect_rel(local_processing_time(task, ue), 0.3, kTol, "local time, URLLC bounds");
  {
    Task mtask;
    mtask.bytes = 2e6;
    mtask.cycles = 2.2e8;
    mtask.slice = SliceId::Mmtc;
    UserEquipment mue = ue;
    mue.local_cpu_freq = 2e8;
    c.expect_rel(local_processing_time(mtask, mue), 1.1, kTol, "local time, mMTC bounds");
    c.expect_rel(local_energy(mue, 1.1), 0.44, kTol, "local energy over 1.1 s");
  }
  {
    Task eq = task;
    eq.cycles = ue.local_cpu_freq;
    c.expect_rel(local_processing_time(eq, ue), 1.0, kTol, "local time, cycles == f_s");
  }

  c.expect_rel(mec_processing_time(task, 2e9), 0.09, kTol, "mec time at 2 GHz");
  {
    Task eq = task;
    eq.cycles = 2e9;
    c.expect_rel(mec_processing_time(eq, 2e9), 1.0, kTol, "mec time, cycles == f_equiv");
    c.expect_rel(mec_processing_time(task, 4e9), 0.045, kTol, "doubling f_equiv halves time");
  }

  c.expect(local_energy(ue, 0.0) == 0.0, "local energy of zero time");
  c.expect_rel(local_energy(ue, 0.3), 0.12, kTol, "local energy over 0.3 s");

  c.expect_rel(mec_energy(ue, t_trans, 0.09), 0.061732575707399699, kTol, "offload energy");
  c.expect(mec_energy(ue, 0.0, 0.09) == 0.0, "offload energy with zero transmission");
  c.expect(mec_energy(ue, 0.25, 0.09) == mec_energy(ue, 0.25, 7.0),
           "offload energy ignores server time (idle power 0)");

  {
    const ExecutionOutcome local =
        execution_outcome(task, ue, radio, mec, make_decision(0, 0));
    c.expect(local.t_exe == local.t_local && local.e_exe == local.e_local &&
                 local.t_trans == 0.0,
             "local branch outcome identities");
  }
  {
    const ExecutionOutcome off =
        execution_outcome(task, ue, radio, mec, make_decision(1, 10));
    c.expect_rel(off.t_exe, 0.39866287853699844, kTol, "URLLC offload latency");

    Task mtask;
    mtask.bytes = 2e6;
    mtask.cycles = 2.2e8;
    mtask.slice = SliceId::Mmtc;
    UserEquipment mue = ue;
    mue.local_cpu_freq = 2e8;
    const ExecutionOutcome moff =
        execution_outcome(mtask, mue, radio, mec, make_decision(1, 10));
    c.expect_rel(moff.e_exe, 0.061732575707399699, kTol, "mMTC offload energy");
    c.expect_rel(moff.e_local, 0.44, kTol, "mMTC local energy reference");
  }

  RewardWeights w;  // alpha = beta = 0.5, delta = 3
  {
    ExecutionOutcome o;
    o.t_local = 0.7;
    o.t_exe = 0.7;
    o.e_local = 1.0;
    o.e_exe = 0.5;
    c.expect(urllc_reward(o, 0.7, w) == 0.0, "URLLC reward at the deadline midpoint");
  }
  {
    ExecutionOutcome o;
    o.t_local = 0.5;
    o.t_exe = 0.25;
    o.e_local = 1.0;
    o.e_exe = 0.5;
    c.expect_rel(urllc_reward(o, 0.7, w), 0.69478267031473784, kTol, "URLLC reward, met");
    c.expect_rel(step_reward(SliceId::Urllc, o, 0.7, w), 0.69478267031473784, kTol,
                 "step reward, unit slice weight");
    RewardWeights w2 = w;
    w2.slice_weight_urllc = 2.0;
    c.expect_rel(step_reward(SliceId::Urllc, o, 0.7, w2), 2 * 0.69478267031473784, kTol,
                 "step reward scales with slice weight");
    o.t_exe = 0.9;
    c.expect_rel(urllc_reward(o, 0.7, w), -0.67194768963716767, kTol, "URLLC reward, missed");
  }
  {
    ExecutionOutcome o;
    o.t_local = 1.0;
    o.t_exe = 1.0;
    o.e_local = 0.4;
    o.e_exe = 0.4;
    c.expect(mmtc_reward(o, w) == 0.0, "mMTC reward on the local branch");
    c.expect(step_reward(SliceId::Mmtc, o, std::nullopt, w) == 0.0,
             "step reward, local branch neutrality");
    o.t_exe = 0.4;
    o.e_exe = 0.1;
    c.expect_rel(mmtc_reward(o, w), 0.76679406167772135, kTol, "mMTC reward, offload win");
    o.t_exe = 2.0;
    o.e_exe = 0.4;
    c.expect(mmtc_reward(o, w) < 0.0, "mMTC reward sign on slow offload");
  }

  {
    c.expect(check_pool_constraints({}, make_pools(80, 40)) == PoolAudit{},
             "empty grant list is clean");
    std::vector<AllocationDecision> grants{{64, 24, true}, {16, 16, true}};
    c.expect(check_pool_constraints(grants, make_pools(80, 40)) == PoolAudit{},
             "grants at exactly the budget are clean");
    grants.push_back({1, 0, true});
    const PoolAudit audit = check_pool_constraints(grants, make_pools(80, 40));
    c.expect(audit == PoolAudit{false, 1, 0}, "one RB overshoot is reported");
  }
}

// ---------------------------------------------------------------------------
// 2. Gradient oracle: analytic vs central finite differences.

std::vector<double> layer_pre_activations(const Layer& layer,
                                          const std::vector<double>& input) {
  std::vector<double> z(layer.b);
  for (int i = 0; i < layer.out; ++i) {
    for (int j = 0; j < layer.in; ++j) {
      z[static_cast<std::size_t>(i)] +=
          layer.w[static_cast<std::size_t>(i) * layer.in + j] * input[static_cast<std::size_t>(j)];
    }
  }
  return z;
}

// True when some hidden pre-activation sits close enough to the ReLU kink
// that a finite-difference probe could cross it.
bool near_relu_kink(const ParameterSet& params, const std::vector<double>& input) {
  std::vector<double> a = input;
  for (std::size_t l = 0; l + 1 < params.layers.size(); ++l) {
    std::vector<double> z = layer_pre_activations(params.layers[l], a);
    for (double v : z) {
      if (std::abs(v) < 1e-3) {
        return true;
      }
    }
    for (double& v : z) {
      v = std::max(0.0, v);
    }
    a = std::move(z);
  }
  return false;
}

void criterion_gradients(Checker& c) {
  Rng rng(20240816);
  const double h = 1e-5;
  const double kTol = 1e-4;
  double worst = 0.0;

  for (int trial = 0; trial < 100; ++trial) {
    MlpSpec spec;
    spec.input_dim = 2 + static_cast<int>(rng.uniform_index(5));
    spec.hidden_dims.clear();
    const int n_hidden = 1 + static_cast<int>(rng.uniform_index(2));
    for (int l = 0; l < n_hidden; ++l) {
      spec.hidden_dims.push_back(3 + static_cast<int>(rng.uniform_index(6)));
    }
    spec.output_dim = 1 + static_cast<int>(rng.uniform_index(3));

    ParameterSet params = ParameterSet::init(spec, rng.next_u64());

    std::vector<double> input(static_cast<std::size_t>(spec.input_dim));
    int resamples = 0;
    do {
      for (double& v : input) {
        v = rng.uniform(-2.0, 2.0);
      }
      resamples += 1;
    } while (near_relu_kink(params, input) && resamples < 100);

    std::vector<double> upstream(static_cast<std::size_t>(spec.output_dim));
    for (double& v : upstream) {
      v = rng.uniform(-1.0, 1.0);
    }
    const auto loss = [&](const ParameterSet& p) {
      const std::vector<double> out = mlp_forward(p, input);
      double sum = 0.0;
      for (std::size_t k = 0; k < out.size(); ++k) {
        sum += upstream[k] * out[k];
      }
      return sum;
    };

    ForwardCache cache;
    mlp_forward(params, input, &cache);
    const Gradients analytic = mlp_backward(params, cache, upstream);

    for (std::size_t l = 0; l < params.layers.size(); ++l) {
      const auto probe = [&](std::vector<double> Layer::*field, std::size_t idx,
                             double analytic_g) {
        ParameterSet p = params;
        (p.layers[l].*field)[idx] += h;
        const double up = loss(p);
        (p.layers[l].*field)[idx] -= 2 * h;
        const double down = loss(p);
        const double fd = (up - down) / (2 * h);
        const double err =
            std::abs(analytic_g - fd) / std::max({1.0, std::abs(analytic_g), std::abs(fd)});
        worst = std::max(worst, err);
      };
      for (std::size_t i = 0; i < params.layers[l].w.size(); ++i) {
        probe(&Layer::w, i, analytic.layers[l].w[i]);
      }
      for (std::size_t i = 0; i < params.layers[l].b.size(); ++i) {
        probe(&Layer::b, i, analytic.layers[l].b[i]);
      }
    }
  }

  std::ostringstream os;
  os << "max relative gradient error " << worst << " exceeds " << kTol;
  c.expect(worst < kTol, os.str());
}

// ---------------------------------------------------------------------------
// 3. Constraint audit: 10,000 random-policy episodes, zero violations.

void criterion_constraints(Checker& c) {
  const EnvConfig env;
  RandomPolicy policy;
  int violations = 0;
  std::string first;

  for (int e = 0; e < 10000; ++e) {
    const EpisodeTrace trace = run_episode(policy, derive_seed(9001, e), env);
    int rem_comm = trace.pools_before.comm_remaining;
    int rem_comp = trace.pools_before.comp_remaining;
    std::vector<AllocationDecision> grants;
    grants.reserve(trace.steps.size());
    bool bad = false;

    for (const TraceStep& s : trace.steps) {
      if (s.mask[static_cast<std::size_t>(s.action_index)] == 0) {
        bad = true;
      }
      if (s.decision.k_comm > rem_comm || s.decision.k_comp > rem_comp) {
        bad = true;
      }
      rem_comm -= s.decision.k_comm;
      rem_comp -= s.decision.k_comp;
      grants.push_back(s.decision);
    }
    if (rem_comm != trace.pools_after.comm_remaining ||
        rem_comp != trace.pools_after.comp_remaining) {
      bad = true;
    }
    const ResourcePools totals =
        make_pools(trace.pools_before.comm_total, trace.pools_before.comp_total);
    if (!check_pool_constraints(grants, totals).ok) {
      bad = true;
    }
    if (bad) {
      violations += 1;
      if (first.empty()) {
        first = "episode " + std::to_string(e);
      }
    }
  }

  c.expect(violations == 0,
           std::to_string(violations) + " episodes violated pool constraints (first: " + first +
               ")");
}

// ---------------------------------------------------------------------------
// 4. Baseline oracle equivalence: sequential rule vs exhaustive menu scan.

AllocationDecision brute_force_decision(const Task& task, const UserEquipment& ue,
                                        double channel_gain, const EnvConfig& env,
                                        int comm_avail, int comp_avail) {
  RadioParams radio = env.radio;
  radio.channel_gain = channel_gain;

  AllocationDecision best = make_decision(0, 0);
  int best_sum = -1;
  int best_comm = -1;

  for (int kc : env.menu.comm_options) {
    for (int kp : env.menu.comp_options) {
      const AllocationDecision d = make_decision(kc, kp);
      if (!d.offload || d.k_comm > comm_avail || d.k_comp > comp_avail) {
        continue;
      }
      const ExecutionOutcome o = execution_outcome(task, ue, radio, env.mec, d);
      bool qualifies = false;
      if (task.slice == SliceId::Urllc) {
        qualifies = task.deadline.has_value() && o.t_exe <= *task.deadline;
      } else {
        qualifies = o.e_exe < o.e_local;
      }
      if (!qualifies) {
        continue;
      }
      const int sum = d.k_comm + d.k_comp;
      if (best_sum < 0 || sum < best_sum || (sum == best_sum && d.k_comm < best_comm)) {
        best = d;
        best_sum = sum;
        best_comm = d.k_comm;
      }
    }
  }
  return best;
}

void criterion_baseline_oracle(Checker& c) {
  const EnvConfig env;
  Rng rng(31337);
  int mismatches = 0;
  int offloads = 0;
  std::string first;

  for (int i = 0; i < 1000; ++i) {
    const bool urllc = rng.uniform() < 0.5;
    const SliceArrivalConfig& slice = urllc ? env.urllc : env.mmtc;

    Task task;
    task.slice = urllc ? SliceId::Urllc : SliceId::Mmtc;
    task.bytes = rng.uniform(slice.bytes_min, slice.bytes_max);
    task.cycles = rng.uniform(slice.cycles_min, slice.cycles_max);
    task.deadline = slice.deadline;

    UserEquipment ue;
    ue.distance = std::max(1.0, rng.uniform(1.0, 1802.7756377319947));
    ue.local_cpu_freq = slice.local_cpu_freq;
    ue.tx_power = slice.tx_power;
    ue.local_process_power = slice.local_process_power;

    const double gain = rng.exponential(1.0);
    const int comm_avail = static_cast<int>(rng.uniform_index(81));
    const int comp_avail = static_cast<int>(rng.uniform_index(41));

    const AllocationDecision got =
        sequential_decision(task, ue, gain, env, comm_avail, comp_avail);
    const AllocationDecision want =
        brute_force_decision(task, ue, gain, env, comm_avail, comp_avail);

    if (got.offload) {
      offloads += 1;
    }
    if (!(got == want)) {
      mismatches += 1;
      if (first.empty()) {
        std::ostringstream os;
        os << "task " << i << ": got (" << got.k_comm << "," << got.k_comp << ","
           << got.offload << "), want (" << want.k_comm << "," << want.k_comp << ","
           << want.offload << ")";
        first = std::move(os).str();
      }
    }
  }

  c.expect(mismatches == 0,
           std::to_string(mismatches) + " of 1000 decisions diverged (" + first + ")");
  c.expect(offloads > 100 && offloads < 1000,
           "sample degenerate: " + std::to_string(offloads) + " offloads of 1000");
}

// ---------------------------------------------------------------------------
// 5. Local-only neutrality: metrics exactly (100, 100, 100), reward exactly 0.

void criterion_local_neutrality(Checker& c) {
  const EnvConfig env;
  LocalOnlyBaseline policy;
  const MetricsRow row = evaluate_policy(policy, env, 7, 200, "local");
  c.expect(row.total_time_pct == 100.0, "total_time_pct != 100");
  c.expect(row.mmtc_energy_pct == 100.0, "mmtc_energy_pct != 100");
  c.expect(row.urllc_time_pct == 100.0, "urllc_time_pct != 100");
  c.expect(row.mean_episode_reward == 0.0, "mean episode reward != 0");
}

// ---------------------------------------------------------------------------
// 6. Fair-baseline operating point at the default arrival means.

void criterion_fair_operating_point(Checker& c, double* out_total) {
  const EnvConfig env;
  FairBaseline policy;
  const MetricsRow row = evaluate_policy(policy, env, 55, 2000, "fair");
  *out_total = row.total_time_pct;
  std::ostringstream os;
  os << "fair total_time_pct " << row.total_time_pct << " outside [95, 101]";
  c.expect(row.total_time_pct >= 95.0 && row.total_time_pct <= 101.0, os.str());
}

// ---------------------------------------------------------------------------
// 7. Fair-baseline flatness across the URLLC arrival sweep.

void criterion_fair_flatness(Checker& c) {
  FairBaseline policy;
  double lo = 1e300;
  double hi = -1e300;
  for (double mean : {2.0, 5.0, 10.0, 15.0, 20.0}) {
    EnvConfig env;
    env.urllc.count_mean = mean;
    const MetricsRow row = evaluate_policy(policy, env, 55, 2000, "fair");
    lo = std::min(lo, row.mmtc_energy_pct);
    hi = std::max(hi, row.mmtc_energy_pct);
  }
  std::ostringstream os;
  os << "fair mmtc_energy_pct spread " << (hi - lo) << " exceeds 2 points (range [" << lo
     << ", " << hi << "])";
  c.expect(hi - lo <= 2.0, os.str());
}

// ---------------------------------------------------------------------------
// 8. Desk-scale PPO training, 3 seeds.

constexpr int kPpoFullEpisodes = 15000;

int ppo_quick_episodes() {
  if (const char* env = std::getenv("MECSIM_ACCEPT_PPO_EPISODES")) {
    const int v = std::atoi(env);
    if (v > 0) {
      return std::min(v, kPpoFullEpisodes);
    }
  }
  return 2000;
}

struct PpoSeedResult {
  int episodes = 0;
  double lead = 0.0;
  double trail = 0.0;
  double train_seconds = 0.0;
  MetricsRow row;
};

PpoSeedResult train_and_eval_ppo(std::uint64_t seed, int episodes, const EnvConfig& env,
                                 std::uint64_t eval_master, int eval_experiments,
                                 const std::string& dir_tag) {
  RunConfig cfg;
  cfg.agent.kind = "ppo";
  cfg.run.seed = seed;
  cfg.run.episodes = episodes;
  const fs::path dir = scratch_dir(dir_tag);

  const auto t0 = std::chrono::steady_clock::now();
  const TrainReport report = cmd_train(cfg, dir.string(), "acceptance");

  PpoSeedResult r;
  r.episodes = episodes;
  r.train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const int window = std::min<int>(1000, static_cast<int>(report.curve.size()) / 2);
  for (int i = 0; i < window; ++i) {
    r.lead += report.curve[static_cast<std::size_t>(i)].reward_sum;
    r.trail += report.curve[report.curve.size() - 1 - static_cast<std::size_t>(i)].reward_sum;
  }
  r.lead /= window;
  r.trail /= window;

  auto policy = make_policy("ppo:" + report.final_checkpoint_path, cfg);
  r.row = evaluate_policy(*policy, env, eval_master, eval_experiments, "ppo");
  return r;
}

void criterion_ppo_training(Checker& c, double fair_total) {
  const int quick_episodes = ppo_quick_episodes();
  const std::uint64_t eval_master = 777;
  const int eval_experiments = 1000;

  const EnvConfig env;
  FairBaseline fair;
  const MetricsRow fair_row = evaluate_policy(fair, env, eval_master, eval_experiments, "fair");

  for (const std::uint64_t seed : {101ULL, 202ULL, 303ULL}) {
    const std::string name = "ppo_seed_" + std::to_string(seed);
    PpoSeedResult r =
        train_and_eval_ppo(seed, quick_episodes, env, eval_master, eval_experiments, name);

    // A quick run that misses the metric margins is not the final word: the
    // full-length run decides. Learning direction and the budget stay checked
    // on whichever run ends up authoritative.
    const bool margins_ok =
        r.row.mmtc_energy_pct <= 85.0 && r.row.urllc_time_pct <= fair_row.urllc_time_pct;
    if (!margins_ok && r.episodes < kPpoFullEpisodes) {
      std::ostringstream os;
      os << "seed " << seed << ": margins missed at " << r.episodes
         << " episodes (mmtc_energy_pct " << r.row.mmtc_energy_pct << ", urllc_time_pct "
         << r.row.urllc_time_pct << " vs fair " << fair_row.urllc_time_pct << "), reran at "
         << kPpoFullEpisodes;
      c.note(os.str());
      r = train_and_eval_ppo(seed, kPpoFullEpisodes, env, eval_master, eval_experiments,
                             name + "_full");
    }

    const std::string tag =
        "seed " + std::to_string(seed) + " (" + std::to_string(r.episodes) + " episodes): ";

    {
      std::ostringstream os;
      os << tag << "no learning: leading mean reward " << r.lead << ", trailing " << r.trail;
      c.expect(r.trail > r.lead, os.str());
    }
    {
      std::ostringstream os;
      os << tag << "total_time_pct " << r.row.total_time_pct << " not under min(100, fair "
         << fair_total << " + 1)";
      c.expect(r.row.total_time_pct < 100.0 && r.row.total_time_pct <= fair_total + 1.0,
               os.str());
    }
    {
      std::ostringstream os;
      os << tag << "mmtc_energy_pct " << r.row.mmtc_energy_pct << " exceeds 85";
      c.expect(r.row.mmtc_energy_pct <= 85.0, os.str());
    }
    {
      std::ostringstream os;
      os << tag << "urllc_time_pct " << r.row.urllc_time_pct << " exceeds fair's "
         << fair_row.urllc_time_pct;
      c.expect(r.row.urllc_time_pct <= fair_row.urllc_time_pct, os.str());
    }
    {
      std::ostringstream os;
      os << tag << "training took " << r.train_seconds << " s, budget 7200";
      c.expect(r.train_seconds <= 7200.0, os.str());
    }
  }
}

// ---------------------------------------------------------------------------
// 9. Determinism: identical config and seed reproduce byte-identical CSVs.

void criterion_determinism(Checker& c) {
  RunConfig base;
  base.run.experiments = 100;

  SweepRequest req;
  req.vary = "urllc-mean";
  req.values = {5.0, 10.0};
  req.policies = {"fair", "local"};

  std::ostringstream first;
  run_sweep(base, req, first);
  std::ostringstream second;
  run_sweep(base, req, second);
  c.expect(first.str() == second.str(), "sweep CSV differs between identical runs");

  RunConfig train;
  train.agent.kind = "ppo";
  train.agent.ppo.hidden_dims = {16};
  train.agent.ppo.episodes_per_rollout = 4;
  train.run.seed = 9;
  train.run.episodes = 8;

  const fs::path a = scratch_dir("determinism_a");
  const fs::path b = scratch_dir("determinism_b");
  cmd_train(train, a.string(), "acceptance");
  cmd_train(train, b.string(), "acceptance");
  c.expect(slurp(a / "training_curve.csv") == slurp(b / "training_curve.csv"),
           "training_curve.csv differs between identical runs");
  c.expect(slurp(a / "checkpoint_final.json") == slurp(b / "checkpoint_final.json"),
           "final checkpoint differs between identical runs");
}

// ---------------------------------------------------------------------------

struct Criterion {
  std::string title;
  double time_budget_s;  // 0 disables the budget check
  std::function<void(Checker&)> run;
};

}  // namespace

int main() {
  double fair_total = 0.0;

  const std::vector<Criterion> criteria{
      {"formula unit suite", 1.0, criterion_formulas},
      {"gradient oracle vs central finite differences", 30.0, criterion_gradients},
      {"constraint audit over 10000 random episodes", 60.0, criterion_constraints},
      {"sequential baseline equals exhaustive menu scan", 0.0, criterion_baseline_oracle},
      {"local-only neutrality", 0.0, criterion_local_neutrality},
      {"fair baseline operating point", 300.0,
       [&fair_total](Checker& c) { criterion_fair_operating_point(c, &fair_total); }},
      {"fair baseline flatness across URLLC sweep", 0.0, criterion_fair_flatness},
      {"PPO training, 3 seeds", 0.0,
       [&fair_total](Checker& c) { criterion_ppo_training(c, fair_total); }},
      {"byte-identical reruns", 0.0, criterion_determinism},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Checker checker;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].run(checker);
    } catch (const std::exception& e) {
      checker.failures.push_back(std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (criteria[i].time_budget_s > 0.0 && seconds > criteria[i].time_budget_s) {
      std::ostringstream os;
      os << "runtime " << seconds << " s exceeds budget " << criteria[i].time_budget_s << " s";
      checker.failures.push_back(std::move(os).str());
    }

    const bool ok = checker.failures.empty();
    std::ostringstream line;
    line << (ok ? "[PASS] " : "[FAIL] ") << (i + 1) << ". " << criteria[i].title << " ("
         << fmt_seconds(seconds) << ")";
    if (!ok) {
      failed += 1;
      for (const std::string& f : checker.failures) {
        line << "\n       - " << f;
      }
    }
    for (const std::string& n : checker.notes) {
      line << "\n       - note: " << n;
    }
    std::printf("%s\n", line.str().c_str());
    std::fflush(stdout);
  }

  if (failed == 0) {
    std::printf("all 9 acceptance criteria passed\n");
  } else {
    std::printf("%d of 9 acceptance criteria FAILED\n", failed);
  }
  return failed;
}
