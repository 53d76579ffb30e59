#pragma once

// Command-line front end: flat key = value configuration, environment
// overrides, experiment dispatch and output files.
//
// Precedence, lowest first: built-in defaults, --config file, EXACTSEL_<KEY>
// environment variables, command-line flags.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "exactsel/csv.hpp"
#include "exactsel/extremal.hpp"
#include "exactsel/risk_lab.hpp"
#include "exactsel/selector.hpp"

namespace exactsel {

inline constexpr const char* kCodeVersion = "0.1.0";
inline constexpr const char* kEnvPrefix = "EXACTSEL_";

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3 };

struct RunConfig {
  std::string experiment;  // table1 | table2 | calibrate | risk | boundary | audit

  DimensionSpec dim{50, 4, 0.87, 1.0, 5e-5};
  std::vector<int> ds{50, 100, 200};  // table1 grid
  int M = 20;
  int J = 15;
  std::vector<double> alphas{0.0001, 0.0005, 0.0009, 0.001, 0.0011, 0.0012, 0.005, 0.5, 1.0};
  std::vector<int> target{1};  // attenuated component
  double alpha = 1.0;          // risk: attenuation of the target
  EnumerationSpec enumeration;
  TruncationMode truncation = TruncationMode::preset;
  CalibrationMode calibration = CalibrationMode::exact;
  EpsHatRule eps_hat_rule = EpsHatRule::fixed;
  NoiseModel noise = NoiseModel::automatic;
  std::uint64_t seed = 20240501;
  std::string out = ".";
  int threads = 1;
  bool quiet = false;

  std::vector<int> calibrate_ks;  // empty: every k <= s

  double audit_T = 3.0;
  std::uint64_t audit_trials = 100000;
  int audit_k = 1;
  int audit_m = 0;  // 1-based; 0 selects the middle of the grid

  int boundary_betas = 20;
  int boundary_r_points = 50;
  std::vector<int> boundary_ks{1, 2};
  double boundary_epsilon = 0.01;
  double boundary_ratio_lo = 0.5;
  double boundary_ratio_hi = 4.0;
  double boundary_band = 0.05;

  /// Known keys in manifest order.
  static const std::vector<std::string>& keys();

  void set(const std::string& key, const std::string& value);  // throws ConfigError
  std::string get(const std::string& key) const;

  /// Fail-fast check of every value the chosen experiment will use; throws ConfigError.
  void validate() const;

  SelectorConfig selector_config() const;
  RiskOptions risk_options() const;
};

/// Applies "key = value" lines ('#' starts a comment) on top of `cfg`.
void apply_config_text(RunConfig& cfg, const std::string& text);

/// Applies EXACTSEL_<KEY> variables found through `lookup`.
void apply_environment(RunConfig& cfg, const std::function<const char*(const char*)>& lookup);

struct RunOutput {
  CsvTable data;
  std::string summary;  // one human-readable line
};

/// Runs the configured experiment without touching the filesystem.
RunOutput execute(const RunConfig& cfg);

/// Manifest text: every config key plus code version, wall time and data file.
std::string manifest_text(const RunConfig& cfg, double wall_seconds, const std::string& data_file);

std::string usage_text();

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace exactsel
