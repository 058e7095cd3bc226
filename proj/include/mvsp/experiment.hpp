#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvsp/grid.hpp"
#include "mvsp/series.hpp"

namespace mvsp {

enum class Preprocessing { interpolate, mirror_extend, characteristic_function, direct_coefficients };

struct SimulationSettings {
  bool enabled = true;
  int qubit_cap = 26;
  std::uint64_t shots = 20000;
  std::uint64_t seed = 1;
  // Shots count circuit executions; only the post-selected fraction is kept.
  bool shots_before_postselection = true;
};

struct AnalysisSettings {
  std::optional<std::filesystem::path> counts;
  double h_min = 0.005;
  double h_max = 0.3;
  int h_count = 40;
};

/// Parsed experiment description (see README for the JSON schema).
struct ExperimentConfig {
  nlohmann::json raw;
  std::filesystem::path base_dir;

  std::string target_name;  // builtin name, or "file"
  nlohmann::json target_params;
  std::optional<std::filesystem::path> coefficient_file;

  Basis basis = Basis::fourier;
  std::vector<int> degrees;
  std::vector<int> degree_list;  // approx sweep; defaults to {degrees}
  std::vector<int> qubits;
  Preprocessing preprocessing = Preprocessing::mirror_extend;
  bool allow_factorization = true;
  int dense_samples = 0;  // 0 = automatic

  SimulationSettings simulation;
  AnalysisSettings analysis;
  std::optional<std::filesystem::path> out_dir;
};

ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Command-line overrides.
struct CommandOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> qubit_cap;
};

/// FNV-1a (64 bit) of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

/// Target function of the configuration, if it has a closed form.
std::optional<TargetFunction> make_target(const ExperimentConfig& cfg);

/// Series for the configured degrees (or an explicit override).
SeriesApprox make_series(const ExperimentConfig& cfg, std::optional<std::vector<int>> degrees = std::nullopt);

GridSpec make_grid(const ExperimentConfig& cfg);

// Each command writes its artifacts into the output directory and returns
// the report that was written.
nlohmann::json cmd_approx(const ExperimentConfig& cfg, const CommandOptions& opt);
nlohmann::json cmd_synth(const ExperimentConfig& cfg, const CommandOptions& opt);
nlohmann::json cmd_simulate(const ExperimentConfig& cfg, const CommandOptions& opt);
nlohmann::json cmd_sample(const ExperimentConfig& cfg, const CommandOptions& opt);
nlohmann::json cmd_analyze(const ExperimentConfig& cfg, const CommandOptions& opt);

/// Exit codes: 0 success, 2 invalid config, 3 resource cap, 4 numeric failure.
int run_command(const std::string& command, const std::filesystem::path& config_path, const CommandOptions& opt,
                std::ostream& log);

}  // namespace mvsp
