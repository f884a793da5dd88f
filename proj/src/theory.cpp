#include "swa/theory.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "swa/error.h"

namespace swa::theory {

void SwaParams::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw InvalidInput(fmt::format("lambda must lie in [0, 1] (got {})", lambda));
  cfg.validate();
}

double swa_utility(const SwaParams& p, const game::DemandProfile& x, std::size_t i) {
  p.validate();
  const double reward = game::intrinsic_reward(p.cfg, x, i);
  const double w = game::welfare(p.cfg, x.total());
  return (1.0 - p.lambda) * reward + p.lambda * w / p.cfg.n;
}

double swa_utility_given_peers(const SwaParams& p, double own, double peers_total) {
  const auto& cfg = p.cfg;
  const double load = own + peers_total;
  const double excess = game::excess_load(load, cfg.capacity);
  const double reward = own - (cfg.beta / cfg.n) * excess;
  const double w = load - cfg.beta * excess;
  return (1.0 - p.lambda) * reward + p.lambda * w / cfg.n;
}

double marginal_incentive_overloaded(const SwaParams& p) {
  p.validate();
  const double n = p.cfg.n;
  const double beta = p.cfg.beta;
  return (1.0 - p.lambda) * (1.0 - beta / n) + (p.lambda / n) * (1.0 - beta);
}

double marginal_incentive_underloaded(const SwaParams& p) {
  p.validate();
  return (1.0 - p.lambda) + p.lambda / p.cfg.n;
}

double welfare_gradient(const game::GameConfig& cfg) {
  cfg.validate();
  return 1.0 - cfg.beta;
}

double critical_lambda(int n, double beta) {
  if (n < 2) throw InvalidInput(fmt::format("n must be >= 2 (got {})", n));
  if (!(beta > 1.0))
    throw InvalidInput(fmt::format("outside the dilemma regime: requires beta > 1 (got {})", beta));
  if (!(beta < n))
    throw InvalidInput(
        fmt::format("outside the dilemma regime: requires beta < n (got beta={}, n={})", beta, n));
  return (n - beta) / (n - 1.0);
}

double critical_lambda(const game::GameConfig& cfg) {
  cfg.validate();
  return critical_lambda(cfg.n, cfg.beta);
}

std::vector<double> uniform_grid(const game::GameConfig& cfg, std::size_t points) {
  if (points < 2) throw InvalidInput("a demand grid needs at least 2 points");
  std::vector<double> grid(points);
  const double last = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = cfg.x_max * static_cast<double>(i) / last;
  grid.back() = cfg.x_max;
  return grid;
}

double best_response(const SwaParams& p, double peers_total, std::span<const double> grid) {
  if (grid.empty()) throw InvalidInput("best_response: empty candidate grid");
  p.validate();

  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());

  double best_utility = -INFINITY;
  for (double a : sorted) best_utility = std::max(best_utility, swa_utility_given_peers(p, a, peers_total));
  for (double a : sorted) {
    if (swa_utility_given_peers(p, a, peers_total) >= best_utility - kTieTolerance) return a;
  }
  return sorted.back();  // unreachable
}

DynamicsResult best_response_dynamics(const SwaParams& p, const game::DemandProfile& initial,
                                      std::span<const double> grid, int max_rounds) {
  p.validate();
  if (initial.size() != static_cast<std::size_t>(p.cfg.n))
    throw InvalidInput("initial profile does not match agent count");

  DynamicsResult out;
  std::vector<double> profile(initial.values().begin(), initial.values().end());
  out.history.push_back(profile);

  for (int round = 0; round < max_rounds; ++round) {
    bool changed = false;
    for (std::size_t i = 0; i < profile.size(); ++i) {
      double peers = 0.0;
      for (std::size_t j = 0; j < profile.size(); ++j)
        if (j != i) peers += profile[j];
      const double next = best_response(p, peers, grid);
      if (next != profile[i]) {
        profile[i] = next;
        changed = true;
      }
    }
    out.history.push_back(profile);
    out.rounds = round + 1;
    if (!changed) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace swa::theory
