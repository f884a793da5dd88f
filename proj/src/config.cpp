#include "swa/config.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "swa/error.h"

namespace swa::config {

namespace {

using nlohmann::json;

template <typename T>
void read_field(const json& obj, const char* section, const char* key, std::optional<T>& dst) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    dst = it->get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(fmt::format("config key {}.{} has the wrong type", section, key));
  }
}

void reject_unknown(const json& obj, const char* section, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw InvalidInput(fmt::format("config section '{}' must be an object", section));
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw InvalidInput(fmt::format("unknown config key '{}.{}'", section, key));
  }
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(trim(item));
  return parts;
}

}  // namespace

std::vector<double> default_lambdas() {
  std::vector<double> out;
  for (int i = 0; i <= 10; ++i) out.push_back(i / 10.0);
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split_commas(text)) {
    if (part.empty()) throw InvalidInput(fmt::format("empty entry in list '{}'", text));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size()) throw InvalidInput(fmt::format("'{}' is not a number", part));
    out.push_back(v);
  }
  if (out.empty()) throw InvalidInput("empty list");
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split_commas(text)) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      if (!part.empty() && part[0] != '-') v = std::stoull(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (part.empty() || used != part.size())
      throw InvalidInput(fmt::format("'{}' is not a non-negative integer seed", part));
    out.push_back(v);
  }
  if (out.empty()) throw InvalidInput("empty seed list");
  return out;
}

void RawConfig::merge(const RawConfig& o) {
  auto take = [](auto& dst, const auto& src) {
    if (src) dst = src;
  };
  take(n, o.n);
  take(capacity, o.capacity);
  take(beta, o.beta);
  take(x_max, o.x_max);
  take(steps, o.steps);
  take(lambdas, o.lambdas);
  take(betas, o.betas);
  take(seeds, o.seeds);
  take(master_seed, o.master_seed);
  take(threads, o.threads);
  take(alpha, o.alpha);
  take(mu0, o.mu0);
  take(w_ref, o.w_ref);
  take(epsilon, o.epsilon);
  take(margin, o.margin);
  take(gamma_center, o.gamma_center);
  take(variant, o.variant);
  take(source, o.source);
  take(k, o.k);
  take(agent_command, o.agent_command);
  take(bridge_timeout_ms, o.bridge_timeout_ms);
  take(handshake_timeout_ms, o.handshake_timeout_ms);
  take(output_dir, o.output_dir);
  take(output_prefix, o.output_prefix);
}

RawConfig parse_config_json(const json& root_in) {
  const json& root = root_in.contains("resolved_config") ? root_in.at("resolved_config") : root_in;
  reject_unknown(root, "<root>", {"game", "sweep", "belief", "group_score", "agents", "output"});

  RawConfig raw;
  if (auto it = root.find("game"); it != root.end()) {
    reject_unknown(*it, "game", {"n", "C", "beta", "x_max", "T"});
    read_field(*it, "game", "n", raw.n);
    read_field(*it, "game", "C", raw.capacity);
    read_field(*it, "game", "beta", raw.beta);
    read_field(*it, "game", "x_max", raw.x_max);
    read_field(*it, "game", "T", raw.steps);
  }
  if (auto it = root.find("sweep"); it != root.end()) {
    reject_unknown(*it, "sweep", {"lambdas", "betas", "seeds", "master_seed", "threads"});
    read_field(*it, "sweep", "lambdas", raw.lambdas);
    read_field(*it, "sweep", "betas", raw.betas);
    read_field(*it, "sweep", "seeds", raw.seeds);
    read_field(*it, "sweep", "master_seed", raw.master_seed);
    read_field(*it, "sweep", "threads", raw.threads);
  }
  if (auto it = root.find("belief"); it != root.end()) {
    reject_unknown(*it, "belief", {"alpha", "mu0"});
    read_field(*it, "belief", "alpha", raw.alpha);
    read_field(*it, "belief", "mu0", raw.mu0);
  }
  if (auto it = root.find("group_score"); it != root.end()) {
    reject_unknown(*it, "group_score", {"W_ref", "epsilon", "margin", "gamma_center"});
    read_field(*it, "group_score", "W_ref", raw.w_ref);
    read_field(*it, "group_score", "epsilon", raw.epsilon);
    read_field(*it, "group_score", "margin", raw.margin);
    read_field(*it, "group_score", "gamma_center", raw.gamma_center);
  }
  if (auto it = root.find("agents"); it != root.end()) {
    reject_unknown(*it, "agents",
                   {"variant", "candidate_source", "k", "command", "timeout_ms",
                    "handshake_timeout_ms"});
    read_field(*it, "agents", "variant", raw.variant);
    read_field(*it, "agents", "candidate_source", raw.source);
    read_field(*it, "agents", "k", raw.k);
    read_field(*it, "agents", "command", raw.agent_command);
    read_field(*it, "agents", "timeout_ms", raw.bridge_timeout_ms);
    read_field(*it, "agents", "handshake_timeout_ms", raw.handshake_timeout_ms);
  }
  if (auto it = root.find("output"); it != root.end()) {
    reject_unknown(*it, "output", {"dir", "prefix"});
    read_field(*it, "output", "dir", raw.output_dir);
    read_field(*it, "output", "prefix", raw.output_prefix);
  }
  return raw;
}

RawConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config file '{}'", path.string()));

  if (path.extension() == ".csv") {
    constexpr std::string_view kTag = "# resolved_config ";
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind(kTag, 0) == 0) {
        try {
          return parse_config_json(json::parse(line.substr(kTag.size())));
        } catch (const json::parse_error& e) {
          throw InvalidInput(fmt::format("embedded config in '{}' is not valid JSON: {}",
                                         path.string(), e.what()));
        }
      }
    }
    throw InvalidInput(fmt::format("'{}' carries no embedded configuration", path.string()));
  }

  try {
    return parse_config_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw InvalidInput(fmt::format("config file '{}' is not valid JSON: {}", path.string(), e.what()));
  }
}

ResolvedConfig resolve(const RawConfig& raw, const std::string& default_prefix) {
  ResolvedConfig rc;
  auto& g = rc.game;
  g.n = raw.n.value_or(5);
  g.capacity = raw.capacity.value_or(20.0);
  g.x_max = raw.x_max.value_or(8.0);
  g.steps = raw.steps.value_or(20);

  if (raw.betas) {
    rc.betas = *raw.betas;
  } else {
    rc.betas = {raw.beta.value_or(1.6)};
  }
  if (rc.betas.empty()) throw InvalidInput("betas must be nonempty");
  g.beta = rc.betas.front();

  rc.lambdas = raw.lambdas.value_or(default_lambdas());
  if (raw.seeds) {
    rc.seeds = *raw.seeds;
  } else {
    for (std::uint64_t s = 1; s <= 10; ++s) rc.seeds.push_back(s);
  }
  rc.master_seed = raw.master_seed.value_or(rc.master_seed);
  rc.threads = raw.threads.value_or(1);

  rc.alpha = raw.alpha.value_or(0.3);
  rc.mu0 = raw.mu0.value_or(g.capacity / g.n);

  rc.w_ref = raw.w_ref.value_or(g.capacity);
  rc.epsilon = raw.epsilon.value_or(1e-6);
  rc.margin = raw.margin.value_or(0.0);
  rc.gamma_center = raw.gamma_center.value_or(0.0);

  rc.variant = policy::parse_variant(raw.variant.value_or("swi_normalized"));
  rc.source = policy::parse_candidate_source(raw.source.value_or("stochastic"));
  rc.k = raw.k.value_or(7);
  rc.agent_command = raw.agent_command.value_or("");
  rc.bridge_timeout_ms = raw.bridge_timeout_ms.value_or(2000);
  rc.handshake_timeout_ms = raw.handshake_timeout_ms.value_or(10000);

  if (raw.output_dir) {
    rc.output_dir = *raw.output_dir;
  } else if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    rc.output_dir = env;
  } else {
    rc.output_dir = "results";
  }
  rc.output_prefix = raw.output_prefix.value_or(default_prefix);

  rc.validate();
  return rc;
}

void ResolvedConfig::validate() const {
  if (source == policy::CandidateSource::kExternal && agent_command.empty())
    throw InvalidInput("candidate_source=external requires agents.command");
  if (bridge_timeout_ms < 1 || handshake_timeout_ms < 1)
    throw InvalidInput("bridge timeouts must be >= 1 ms");
  if (output_prefix.empty()) throw InvalidInput("output prefix must be nonempty");
  to_sweep_spec().validate();
}

engine::SweepSpec ResolvedConfig::to_sweep_spec() const {
  engine::SweepSpec spec;
  spec.base.game = game;
  spec.base.agents = engine::homogeneous_agents(game.n, lambdas.empty() ? 0.0 : lambdas.front(),
                                                variant, source, k);
  spec.base.group = belief::GroupScoreConfig{w_ref, epsilon, margin, gamma_center};
  spec.base.belief = belief::BeliefParams{alpha, mu0};
  spec.lambdas = lambdas;
  spec.betas = betas;
  spec.seeds = seeds;
  spec.master_seed = master_seed;
  spec.threads = threads;
  return spec;
}

nlohmann::json ResolvedConfig::to_json() const {
  json j;
  j["game"] = {{"n", game.n}, {"C", game.capacity}, {"beta", game.beta},
               {"x_max", game.x_max}, {"T", game.steps}};
  j["sweep"] = {{"lambdas", lambdas}, {"betas", betas}, {"seeds", seeds},
                {"master_seed", master_seed}, {"threads", threads}};
  j["belief"] = {{"alpha", alpha}, {"mu0", mu0}};
  j["group_score"] = {{"W_ref", w_ref}, {"epsilon", epsilon}, {"margin", margin},
                      {"gamma_center", gamma_center}};
  j["agents"] = {{"variant", std::string(policy::to_string(variant))},
                 {"candidate_source", std::string(policy::to_string(source))},
                 {"k", k},
                 {"command", agent_command},
                 {"timeout_ms", bridge_timeout_ms},
                 {"handshake_timeout_ms", handshake_timeout_ms}};
  j["output"] = {{"dir", output_dir}, {"prefix", output_prefix}};
  return j;
}

}  // namespace swa::config
