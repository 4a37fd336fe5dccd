#pragma once

#include <cstdint>
#include <string>

#include "mecsim/agents.hpp"
#include "mecsim/episode.hpp"

namespace mecsim {

struct RunBlock {
  std::uint64_t seed = 1;
  int episodes = 15000;          // training episodes
  int experiments = 5000;        // evaluation episodes per metrics row
  std::string out_dir = "out";
  int checkpoint_interval = 1000;

  bool operator==(const RunBlock&) const = default;
};

struct AgentBlock {
  std::string kind = "ppo";  // "ppo" or "dqn"
  PpoConfig ppo;
  DqnConfig dqn;

  bool operator==(const AgentBlock&) const = default;
};

// Full run description. Default-constructed state is the reference
// configuration; parse_config("") produces an equal value.
struct RunConfig {
  EnvConfig env;
  AgentBlock agent;
  RunBlock run;

  bool operator==(const RunConfig&) const = default;
};

// Parses TOML text over the default configuration. Unknown keys, type
// mismatches, and out-of-range values raise std::runtime_error with
// "<origin>:<line>:" prefixes where a source line exists.
RunConfig parse_config(const std::string& text, const std::string& origin = "config");

// Reads and parses a config file; the path becomes the error origin.
RunConfig load_config(const std::string& path);

// Renders the canonical TOML form. Doubles are written with enough digits
// to round-trip exactly: parse_config(save_config(c)) == c.
std::string save_config(const RunConfig& cfg);

// Raises std::runtime_error naming the offending key when any value is
// outside its documented domain. parse_config and load_config call this.
void validate_config(const RunConfig& cfg);

}  // namespace mecsim
