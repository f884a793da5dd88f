#include "swa/results_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "swa/error.h"
#include "swa/theory.h"

namespace swa::results {

namespace {

using nlohmann::json;

constexpr std::string_view kConfigTag = "# resolved_config ";

std::string field(const std::optional<double>& v) { return v ? fixed6(*v) : std::string(); }

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_real(const std::string& s, std::size_t line_no, const char* column) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
    throw InvalidInput(fmt::format("row {}: column {} holds '{}', not a number", line_no, column, s));
  return v;
}

std::optional<double> parse_optional(const std::string& s, std::size_t line_no, const char* column) {
  if (s.empty()) return std::nullopt;
  return parse_real(s, line_no, column);
}

}  // namespace

std::string build_identifier() {
#if defined(__clang__)
  const char* compiler = "clang";
#elif defined(__GNUC__)
  const char* compiler = "gcc";
#else
  const char* compiler = "unknown";
#endif
#ifdef __VERSION__
  return fmt::format("swa 0.1.0 ({} {}, C++{})", compiler, __VERSION__, __cplusplus);
#else
  return fmt::format("swa 0.1.0 ({}, C++{})", compiler, __cplusplus);
#endif
}

std::string fixed6(double v) {
  std::string s = fmt::format("{:.6f}", v);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::vector<ResultRow> to_rows(const engine::SweepResult& result, int n) {
  std::vector<ResultRow> rows;
  rows.reserve(result.cells.size());
  for (const auto& c : result.cells) {
    ResultRow r;
    r.lambda = c.lambda;
    r.beta = c.beta;
    r.seed = c.seed_label;
    r.lambda_star = theory::critical_lambda(n, c.beta);
    if (c.episode) {
      r.overload_rate = c.episode->overload_rate;
      r.mean_welfare = c.episode->mean_welfare;
      r.mean_load = c.episode->mean_load;
    }
    r.delta_welfare = c.delta_welfare;
    rows.push_back(r);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.beta != b.beta) return a.beta < b.beta;
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    return a.seed < b.seed;
  });
  return rows;
}

std::string serialize_csv(const std::vector<ResultRow>& rows,
                          const std::optional<nlohmann::json>& config) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", fixed6(r.lambda), fixed6(r.beta), r.seed,
                       field(r.overload_rate), field(r.mean_welfare), field(r.delta_welfare),
                       field(r.mean_load), fixed6(r.lambda_star));
  }
  if (config) {
    out += kConfigTag;
    out += config->dump();
    out += '\n';
  }
  return out;
}

ParsedCsv parse_csv(std::string_view text) {
  ParsedCsv out;
  bool header_seen = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.rfind(kConfigTag, 0) == 0) {
        try {
          out.config = json::parse(line.substr(kConfigTag.size()));
        } catch (const json::parse_error&) {
          throw InvalidInput(fmt::format("row {}: embedded config is not valid JSON", line_no));
        }
      }
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader)
        throw InvalidInput(fmt::format("row {}: expected header '{}'", line_no, kCsvHeader));
      header_seen = true;
      continue;
    }
    const auto f = split_fields(line);
    if (f.size() != 8)
      throw InvalidInput(fmt::format("row {}: expected 8 columns, found {}", line_no, f.size()));
    ResultRow r;
    r.lambda = parse_real(f[0], line_no, "lambda");
    r.beta = parse_real(f[1], line_no, "beta");
    {
      std::size_t used = 0;
      try {
        if (!f[2].empty() && f[2][0] != '-') r.seed = std::stoull(f[2], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (f[2].empty() || used != f[2].size())
        throw InvalidInput(fmt::format("row {}: column seed holds '{}', not an integer", line_no, f[2]));
    }
    r.overload_rate = parse_optional(f[3], line_no, "overload_rate");
    r.mean_welfare = parse_optional(f[4], line_no, "mean_welfare");
    r.delta_welfare = parse_optional(f[5], line_no, "delta_welfare");
    r.mean_load = parse_optional(f[6], line_no, "mean_load");
    r.lambda_star = parse_real(f[7], line_no, "lambda_star");
    out.rows.push_back(r);
  }
  if (!header_seen) throw InvalidInput("results CSV has no header line");
  return out;
}

nlohmann::json make_metadata(const std::string& command, const config::ResolvedConfig& rc,
                             const engine::SweepResult& result) {
  json meta;
  meta["tool"] = "swa";
  meta["build"] = build_identifier();
  meta["command"] = command;
  meta["resolved_config"] = rc.to_json();
  meta["cell_seed_scheme"] = engine::kCellSeedScheme;
  meta["agent_stream_seed"] = "splitmix64 sub-stream of the cell seed keyed by agent rng_seed (= agent id)";
  meta["mu0_source"] = rc.mu0 == rc.game.capacity / rc.game.n ? "fair_share C/n" : "configured";
  meta["delta_welfare_method"] =
      result.has_baseline
          ? "per-seed difference against the same-seed lambda=0 cell (common random numbers)"
          : "omitted: lambda=0 not in sweep";
  meta["variant"] = std::string(policy::to_string(rc.variant));
  if (rc.variant == policy::Variant::kExactUtility)
    meta["variant_note"] =
        "exact_utility: agents maximise the exact SWA utility with peers at (n-1)*mu; a theory "
        "validation variant, not the normalised-score SWI rule";

  json thresholds = json::array();
  const auto points = engine::summarize(result);
  for (double beta : rc.betas) {
    json t;
    t["beta"] = beta;
    t["lambda_star"] = theory::critical_lambda(rc.game.n, beta);
    const auto onset = engine::transition_lambda(points, beta);
    t["empirical_transition_lambda"] = onset ? json(*onset) : json(nullptr);
    thresholds.push_back(t);
  }
  meta["thresholds"] = thresholds;

  json cells = json::array();
  for (const auto& c : result.cells) {
    json cj;
    cj["lambda"] = c.lambda;
    cj["beta"] = c.beta;
    cj["seed"] = c.seed_label;
    cj["cell_seed"] = c.cell_seed;
    cj["fallbacks"] = c.episode ? c.episode->fallbacks : 0;
    if (!c.error.empty()) cj["error"] = c.error;
    cells.push_back(cj);
  }
  meta["cells"] = cells;
  meta["bridge"] = {{"fallbacks", result.total_fallbacks()}};
  meta["warnings"] = result.warnings;
  return meta;
}

std::string serialize_steps_csv(const engine::SweepResult& result,
                                const std::optional<nlohmann::json>& config) {
  std::string out;
  int n = 0;
  for (const auto& c : result.cells)
    if (c.episode && !c.episode->records.empty())
      n = std::max(n, static_cast<int>(c.episode->records.front().demands.size()));
  out += "lambda,beta,seed,t,load,welfare,overloaded";
  for (int i = 0; i < n; ++i) out += fmt::format(",x_{}", i);
  out += '\n';
  for (const auto& c : result.cells) {
    if (!c.episode) continue;
    for (const auto& r : c.episode->records) {
      out += fmt::format("{},{},{},{},{},{},{}", fixed6(c.lambda), fixed6(c.beta), c.seed_label, r.t,
                         fixed6(r.load), fixed6(r.welfare), r.overloaded ? 1 : 0);
      for (double x : r.demands) out += "," + fixed6(x);
      out += '\n';
    }
  }
  if (config) {
    out += kConfigTag;
    out += config->dump();
    out += '\n';
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError(fmt::format("cannot create directory '{}': {}", path.parent_path().string(), ec.message()));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

WrittenFiles write_outputs(const std::string& command, const config::ResolvedConfig& rc,
                           const engine::SweepResult& result, bool with_steps) {
  const std::filesystem::path dir(rc.output_dir);
  WrittenFiles files;
  files.csv = dir / (rc.output_prefix + ".csv");
  files.metadata = dir / (rc.output_prefix + ".meta.json");

  write_file(files.csv, serialize_csv(to_rows(result, rc.game.n), rc.to_json()));
  write_file(files.metadata, make_metadata(command, rc, result).dump(2) + "\n");
  if (with_steps) {
    files.steps = dir / (rc.output_prefix + ".steps.csv");
    write_file(*files.steps, serialize_steps_csv(result, rc.to_json()));
  }
  return files;
}

}  // namespace swa::results
