#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swa/belief.h"
#include "swa/game.h"
#include "swa/rng.h"

namespace swa::policy {

enum class Variant {
  kSwiNormalized,  // (1 - lambda) * S_self + lambda * S_group
  kExactUtility,   // exact SWA utility with peers fixed at (n - 1) * mu
};

enum class CandidateSource { kGrid, kStochastic, kExternal };

std::string_view to_string(Variant v);
std::string_view to_string(CandidateSource s);
Variant parse_variant(std::string_view s);
CandidateSource parse_candidate_source(std::string_view s);

struct AgentSpec {
  int id = 0;
  double lambda = 0.0;
  Variant variant = Variant::kSwiNormalized;
  CandidateSource source = CandidateSource::kStochastic;
  int k = 7;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Sorted, deduplicated demands, all within [0, x_max].
class CandidateSet {
 public:
  // Throws InvalidInput if empty or any value lies outside [0, x_max].
  CandidateSet(const game::GameConfig& cfg, std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool contains(double a) const;

 private:
  std::vector<double> values_;
};

/// {0, C/n, x_max}: abstain, fair share, greedy.
std::vector<double> anchor_values(const game::GameConfig& cfg);
CandidateSet anchor_set(const game::GameConfig& cfg);

struct GeneratedCandidates {
  CandidateSet set;
  // External proposal was missing or malformed; set holds only the anchors.
  bool fallback = false;
};

/// Builds the candidate set for one decision.
///
/// grid:       k evenly spaced values on [0, x_max], plus anchors.
/// stochastic: k uniform draws on [0, x_max] from `rng`, plus anchors.
/// external:   `external` values clipped into [0, x_max], plus anchors. An
///             absent, empty, or non-finite proposal falls back to the anchors.
GeneratedCandidates generate_candidates(const AgentSpec& spec, const game::GameConfig& cfg,
                                        Rng& rng,
                                        const std::optional<std::vector<double>>& external = {});

double score_self(const game::GameConfig& cfg, double a);

struct ScoredCandidate {
  double a = 0.0;
  double s_self = 0.0;
  double s_group = 0.0;
  // Selection objective. For the exact-utility variant this is the SWA
  // utility rather than the normalised blend.
  double combined = 0.0;
};

struct Selection {
  double chosen = 0.0;
  std::vector<ScoredCandidate> scored;
};

/// Argmax of the agent's objective over `candidates`; smallest demand on ties.
Selection select_swi(const AgentSpec& spec, const game::GameConfig& cfg,
                     const belief::GroupScoreConfig& gsc, const belief::BeliefState& belief,
                     const CandidateSet& candidates);

}  // namespace swa::policy
