#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "swa/game.h"

namespace swa::theory {

// Utilities closer than this are treated as tied; ties go to the smaller demand.
inline constexpr double kTieTolerance = 1e-9;

struct SwaParams {
  double lambda = 0.0;
  game::GameConfig cfg;

  void validate() const;
};

/// (1 - lambda) * R_i(x) + lambda * W(x) / n.
double swa_utility(const SwaParams& p, const game::DemandProfile& x, std::size_t i);

// Same utility for an agent demanding `own` while its peers contribute
// `peers_total`. Only the aggregate matters, so no profile is needed.
double swa_utility_given_peers(const SwaParams& p, double own, double peers_total);

/// dU/dx_i for X > C: (1 - lambda)(1 - beta/n) + (lambda/n)(1 - beta).
double marginal_incentive_overloaded(const SwaParams& p);

/// dU/dx_i for X < C: (1 - lambda) + lambda/n, positive for every lambda.
double marginal_incentive_underloaded(const SwaParams& p);

/// dW/dx_i for X > C.
double welfare_gradient(const game::GameConfig& cfg);

/// (n - beta) / (n - 1). Throws InvalidInput outside 1 < beta < n, n >= 2.
double critical_lambda(int n, double beta);
double critical_lambda(const game::GameConfig& cfg);

// Evenly spaced demands on [0, x_max], endpoints included.
std::vector<double> uniform_grid(const game::GameConfig& cfg, std::size_t points = 81);

/// Grid point maximising swa_utility_given_peers; smallest demand on ties.
double best_response(const SwaParams& p, double peers_total, std::span<const double> grid);

struct DynamicsResult {
  // history.front() is the initial profile; one entry per completed round.
  std::vector<std::vector<double>> history;
  bool converged = false;
  int rounds = 0;

  const std::vector<double>& final_profile() const { return history.back(); }
};

/// Round-robin best responses until a full round leaves the profile
/// unchanged or max_rounds is exhausted.
DynamicsResult best_response_dynamics(const SwaParams& p, const game::DemandProfile& initial,
                                      std::span<const double> grid, int max_rounds);

}  // namespace swa::theory
