#include "swa/policy.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "swa/error.h"
#include "swa/theory.h"

namespace swa::policy {

namespace {

constexpr double kDedupTolerance = 1e-12;

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kSwiNormalized: return "swi_normalized";
    case Variant::kExactUtility: return "exact_utility";
  }
  return "unknown";
}

std::string_view to_string(CandidateSource s) {
  switch (s) {
    case CandidateSource::kGrid: return "grid";
    case CandidateSource::kStochastic: return "stochastic";
    case CandidateSource::kExternal: return "external";
  }
  return "unknown";
}

Variant parse_variant(std::string_view s) {
  if (s == "swi_normalized") return Variant::kSwiNormalized;
  if (s == "exact_utility") return Variant::kExactUtility;
  throw InvalidInput(fmt::format("unknown variant '{}' (expected swi_normalized|exact_utility)", s));
}

CandidateSource parse_candidate_source(std::string_view s) {
  if (s == "grid") return CandidateSource::kGrid;
  if (s == "stochastic") return CandidateSource::kStochastic;
  if (s == "external") return CandidateSource::kExternal;
  throw InvalidInput(
      fmt::format("unknown candidate source '{}' (expected grid|stochastic|external)", s));
}

void AgentSpec::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw InvalidInput(fmt::format("agent {}: lambda must lie in [0, 1] (got {})", id, lambda));
  if (source != CandidateSource::kExternal && k < 2)
    throw InvalidInput(fmt::format("agent {}: k must be >= 2 (got {})", id, k));
}

CandidateSet::CandidateSet(const game::GameConfig& cfg, std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw InvalidInput("candidate set must be nonempty");
  for (double a : values_) {
    if (!std::isfinite(a) || a < 0.0 || a > cfg.x_max)
      throw InvalidInput(fmt::format("candidate {} outside [0, {}]", a, cfg.x_max));
  }
  std::sort(values_.begin(), values_.end());
  auto last = std::unique(values_.begin(), values_.end(),
                          [](double x, double y) { return std::abs(x - y) <= kDedupTolerance; });
  values_.erase(last, values_.end());
}

bool CandidateSet::contains(double a) const {
  return std::any_of(values_.begin(), values_.end(),
                     [a](double v) { return std::abs(v - a) <= kDedupTolerance; });
}

std::vector<double> anchor_values(const game::GameConfig& cfg) {
  return {0.0, cfg.fair_share(), cfg.x_max};
}

CandidateSet anchor_set(const game::GameConfig& cfg) { return CandidateSet(cfg, anchor_values(cfg)); }

GeneratedCandidates generate_candidates(const AgentSpec& spec, const game::GameConfig& cfg,
                                        Rng& rng,
                                        const std::optional<std::vector<double>>& external) {
  spec.validate();
  std::vector<double> values = anchor_values(cfg);

  switch (spec.source) {
    case CandidateSource::kGrid: {
      const double last = static_cast<double>(spec.k - 1);
      for (int i = 0; i < spec.k; ++i) values.push_back(cfg.x_max * i / last);
      values.back() = cfg.x_max;
      break;
    }
    case CandidateSource::kStochastic:
      for (int i = 0; i < spec.k; ++i) values.push_back(rng.uniform(0.0, cfg.x_max));
      break;
    case CandidateSource::kExternal: {
      const bool malformed =
          !external || external->empty() ||
          std::any_of(external->begin(), external->end(), [](double v) { return !std::isfinite(v); });
      if (malformed) return {anchor_set(cfg), true};
      for (double v : *external) values.push_back(std::clamp(v, 0.0, cfg.x_max));
      break;
    }
  }
  return {CandidateSet(cfg, std::move(values)), false};
}

double score_self(const game::GameConfig& cfg, double a) {
  if (!std::isfinite(a) || a < 0.0 || a > cfg.x_max)
    throw InvalidInput(fmt::format("demand {} outside [0, {}]", a, cfg.x_max));
  return a / cfg.x_max;
}

Selection select_swi(const AgentSpec& spec, const game::GameConfig& cfg,
                     const belief::GroupScoreConfig& gsc, const belief::BeliefState& belief,
                     const CandidateSet& candidates) {
  spec.validate();
  const double peers = (cfg.n - 1) * belief.mu;
  const theory::SwaParams swa{spec.lambda, cfg};

  Selection out;
  out.scored.reserve(candidates.size());
  for (double a : candidates.values()) {
    ScoredCandidate sc;
    sc.a = a;
    sc.s_self = score_self(cfg, a);
    sc.s_group = belief::group_score(cfg, gsc, belief::predicted_total(belief, a, cfg));
    if (spec.variant == Variant::kSwiNormalized) {
      sc.combined = (1.0 - spec.lambda) * sc.s_self + spec.lambda * sc.s_group;
    } else {
      sc.combined = theory::swa_utility_given_peers(swa, a, peers);
    }
    out.scored.push_back(sc);
  }

  double best = -INFINITY;
  for (const auto& sc : out.scored) best = std::max(best, sc.combined);
  // Candidates are ascending, so the first near-maximal one is the smallest.
  for (const auto& sc : out.scored) {
    if (sc.combined >= best - theory::kTieTolerance) {
      out.chosen = sc.a;
      break;
    }
  }
  return out;
}

}  // namespace swa::policy
