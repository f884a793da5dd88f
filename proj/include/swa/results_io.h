#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "swa/config.h"
#include "swa/engine.h"

namespace swa::results {

inline constexpr std::string_view kCsvHeader =
    "lambda,beta,seed,overload_rate,mean_welfare,delta_welfare,mean_load,lambda_star";

// Identifies the binary that produced an output file.
std::string build_identifier();

/// One CSV line. Metrics are empty for a failed cell; delta_welfare is empty
/// when the sweep had no lambda = 0 baseline.
struct ResultRow {
  double lambda = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> overload_rate;
  std::optional<double> mean_welfare;
  std::optional<double> delta_welfare;
  std::optional<double> mean_load;
  double lambda_star = 0.0;
};

// Sorted by (beta, lambda, seed).
std::vector<ResultRow> to_rows(const engine::SweepResult& result, int n);

/// Header line, one fixed 6-decimal row per cell, then a trailing
/// "# resolved_config {...}" comment line when `config` is given.
std::string serialize_csv(const std::vector<ResultRow>& rows,
                          const std::optional<nlohmann::json>& config = std::nullopt);

struct ParsedCsv {
  std::vector<ResultRow> rows;
  std::optional<nlohmann::json> config;
};

// Throws InvalidInput naming the offending line on malformed input.
ParsedCsv parse_csv(std::string_view text);

/// Metadata document accompanying a results CSV.
nlohmann::json make_metadata(const std::string& command, const config::ResolvedConfig& rc,
                             const engine::SweepResult& result);

// Per-step trace for single runs: lambda,beta,seed,t,load,welfare,overloaded,x_0..x_{n-1},
// followed by the same embedded config line as the results CSV.
std::string serialize_steps_csv(const engine::SweepResult& result,
                                const std::optional<nlohmann::json>& config = std::nullopt);

struct WrittenFiles {
  std::filesystem::path csv;
  std::filesystem::path metadata;
  std::optional<std::filesystem::path> steps;
};

/// Writes <dir>/<prefix>.csv and <dir>/<prefix>.meta.json (plus
/// <prefix>.steps.csv when `with_steps`). Throws IoError on failure.
WrittenFiles write_outputs(const std::string& command, const config::ResolvedConfig& rc,
                           const engine::SweepResult& result, bool with_steps);

std::string fixed6(double v);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace swa::results
