#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swa/engine.h"
#include "swa/game.h"
#include "swa/policy.h"

namespace swa::config {

inline constexpr const char* kOutputDirEnv = "SWA_OUTPUT_DIR";

/// Every knob with defaults applied. This is the form echoed into outputs.
struct ResolvedConfig {
  game::GameConfig game;

  std::vector<double> lambdas;
  std::vector<double> betas;
  std::vector<std::uint64_t> seeds;
  std::uint64_t master_seed = 20260101;
  int threads = 1;

  double alpha = 0.3;
  double mu0 = 4.0;

  double w_ref = 20.0;
  double epsilon = 1e-6;
  double margin = 0.0;
  double gamma_center = 0.0;

  policy::Variant variant = policy::Variant::kSwiNormalized;
  policy::CandidateSource source = policy::CandidateSource::kStochastic;
  int k = 7;
  std::string agent_command;
  int bridge_timeout_ms = 2000;
  int handshake_timeout_ms = 10000;

  std::string output_dir = "results";
  std::string output_prefix = "sweep";

  void validate() const;
  engine::SweepSpec to_sweep_spec() const;
  nlohmann::json to_json() const;
};

/// Unresolved settings: every field optional so layers can be merged.
///
/// Precedence is flags > file > environment > built-in defaults. The file
/// format is JSON with the same nesting as ResolvedConfig::to_json(); a
/// metadata file (or anything carrying a "resolved_config" object) is
/// accepted too, so a run can be replayed from its own output.
struct RawConfig {
  std::optional<int> n;
  std::optional<double> capacity;
  std::optional<double> beta;
  std::optional<double> x_max;
  std::optional<int> steps;

  std::optional<std::vector<double>> lambdas;
  std::optional<std::vector<double>> betas;
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<std::uint64_t> master_seed;
  std::optional<int> threads;

  std::optional<double> alpha;
  std::optional<double> mu0;

  std::optional<double> w_ref;
  std::optional<double> epsilon;
  std::optional<double> margin;
  std::optional<double> gamma_center;

  std::optional<std::string> variant;
  std::optional<std::string> source;
  std::optional<int> k;
  std::optional<std::string> agent_command;
  std::optional<int> bridge_timeout_ms;
  std::optional<int> handshake_timeout_ms;

  std::optional<std::string> output_dir;
  std::optional<std::string> output_prefix;

  // Fields set in `over` replace ours.
  void merge(const RawConfig& over);
};

RawConfig parse_config_json(const nlohmann::json& j);

// Reads a JSON config or metadata file, or the embedded config line of a
// results CSV.
RawConfig load_config_file(const std::filesystem::path& path);

/// Applies defaults and validates. `default_prefix` names the output files
/// when neither file nor flags do.
ResolvedConfig resolve(const RawConfig& raw, const std::string& default_prefix = "sweep");

std::vector<double> default_lambdas();

// "0,0.5,1" -> {0, 0.5, 1}; throws InvalidInput on junk.
std::vector<double> parse_real_list(const std::string& text);
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace swa::config
