#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "swa/belief.h"
#include "swa/game.h"
#include "swa/policy.h"

namespace swa::engine {

/// Everything needed to play one episode except the seed.
struct EpisodeSetup {
  game::GameConfig game;
  std::vector<policy::AgentSpec> agents;
  belief::GroupScoreConfig group;
  belief::BeliefParams belief;

  void validate() const;
};

// n agents sharing lambda, variant and candidate source; agent i gets
// rng_seed = i.
std::vector<policy::AgentSpec> homogeneous_agents(int n, double lambda, policy::Variant variant,
                                                  policy::CandidateSource source, int k);

struct ProposeRequest {
  int t = 0;
  int agent_id = 0;
  double mu = 0.0;
  // Empty on the first step.
  std::optional<double> last_load;
  std::optional<double> last_reward;
};

/// Supplies candidate demands for agents whose source is external.
class CandidateProposer {
 public:
  virtual ~CandidateProposer() = default;
  // std::nullopt signals a failed round (timeout, malformed reply).
  virtual std::optional<std::vector<double>> propose(const ProposeRequest& request) = 0;
};

// Called once per episode with that episode's setup.
using ProposerFactory = std::function<std::unique_ptr<CandidateProposer>(const EpisodeSetup&)>;

struct EpisodeResult {
  std::vector<game::StepRecord> records;
  double overload_rate = 0.0;
  double mean_welfare = 0.0;
  double mean_load = 0.0;
  EpisodeSetup setup;
  std::uint64_t seed = 0;
  // Agent-steps that fell back to the anchor set.
  int fallbacks = 0;
};

/// Plays T simultaneous-move steps.
///
/// Each step every agent draws candidates and selects against the belief it
/// held at the end of the previous step; the joint profile is then applied and
/// every belief absorbs the realised mean demand. Deterministic given `seed`.
EpisodeResult run_episode(const EpisodeSetup& setup, std::uint64_t seed,
                          CandidateProposer* proposer = nullptr);

inline constexpr const char* kCellSeedScheme = "splitmix64-counter-v1";

/// Collision-free for a fixed master seed as long as each index is < 2^21:
/// the indices are packed into one counter, spaced by an odd constant and
/// passed through the SplitMix64 bijection.
std::uint64_t derive_cell_seed(std::uint64_t master_seed, std::size_t lambda_index,
                               std::size_t beta_index, std::size_t seed_index);

struct SweepSpec {
  EpisodeSetup base;
  std::vector<double> lambdas;
  std::vector<double> betas;
  // Replicate labels; the cell seed comes from the replicate's index.
  std::vector<std::uint64_t> seeds;
  std::uint64_t master_seed = 0;
  int threads = 1;
  // Needed only when agents use the external candidate source. Sweeps with a
  // factory run their cells sequentially.
  ProposerFactory proposer_factory;

  void validate() const;
};

struct SweepCell {
  std::size_t lambda_index = 0;
  std::size_t beta_index = 0;
  std::size_t seed_index = 0;
  double lambda = 0.0;
  double beta = 0.0;
  std::uint64_t seed_label = 0;
  std::uint64_t cell_seed = 0;
  std::optional<EpisodeResult> episode;
  std::string error;
  // mean_welfare minus the same-seed lambda = 0 cell; empty without a baseline.
  std::optional<double> delta_welfare;
  std::optional<double> baseline_welfare;
};

struct SweepResult {
  // Ordered by (beta_index, lambda_index, seed_index).
  std::vector<SweepCell> cells;
  bool has_baseline = false;
  std::vector<std::string> warnings;

  int total_fallbacks() const;
};

EpisodeSetup cell_setup(const SweepSpec& spec, std::size_t lambda_index, std::size_t beta_index);

/// Runs one cell exactly as run_sweep would.
EpisodeResult run_cell(const SweepSpec& spec, std::size_t lambda_index, std::size_t beta_index,
                       std::size_t seed_index);

SweepResult run_sweep(const SweepSpec& spec);

struct Band {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

// Seed-aggregated metrics for one (beta, lambda) point.
struct PointSummary {
  double beta = 0.0;
  double lambda = 0.0;
  Band overload_rate;
  Band mean_welfare;
  std::optional<Band> delta_welfare;
  Band mean_load;
};

// Ordered by (beta, lambda); failed cells are skipped.
std::vector<PointSummary> summarize(const SweepResult& result);

/// Smallest lambda from which the seed-mean OR stays <= `level` for every
/// larger lambda of the same beta. Empty if even the largest lambda overloads.
std::optional<double> transition_lambda(const std::vector<PointSummary>& points, double beta,
                                        double level = 0.5);

}  // namespace swa::engine
