#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wetsim/types.hpp"

namespace wetsim {

// Raised with a line-anchored message; maps to exit code 2 in the CLI.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Full run configuration: system parameters plus sweep grids and artifact
// emission settings. Parsed from "key = value" text with [section] headers.
struct RunConfig {
  SystemConfig system;

  int L = 8;
  std::vector<int> L_grid;  // defaults to {L} when empty

  int trials = 1000;
  std::vector<int> Q_grid = {1, 3};
  std::vector<int> N_grid;  // defaults to {system.N}
  std::vector<int> K_grid;  // defaults to {system.K}

  std::string epsilon_mode = "calibrated";  // calibrated | fixed
  double epsilon_percentile = 95.0;
  double epsilon_value = 0.0;

  int cluster_Q = 2;
  std::vector<double> cluster_phases;  // optional explicit demo phases (K = 2)

  std::string output_dir = ".";
  int workers = 0;  // 0 = logical cores

  void validate() const;
  std::string canonical() const;   // deterministic serialization
  std::string hash() const;        // short content hash for filenames

  std::vector<int> effective_L_grid() const { return L_grid.empty() ? std::vector<int>{L} : L_grid; }
  std::vector<int> effective_N_grid() const { return N_grid.empty() ? std::vector<int>{system.N} : N_grid; }
  std::vector<int> effective_K_grid() const { return K_grid.empty() ? std::vector<int>{system.K} : K_grid; }
  std::optional<double> fixed_epsilon() const {
    if (epsilon_mode == "fixed") return epsilon_value;
    return std::nullopt;
  }
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Apply one "section.key=value" override on top of a parsed config.
void apply_override(RunConfig& cfg, const std::string& assignment);

}  // namespace wetsim
