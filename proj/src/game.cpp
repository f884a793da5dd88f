#include "swa/game.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "swa/error.h"

namespace swa::game {

void GameConfig::validate() const {
  if (n < 2) throw InvalidInput(fmt::format("n must be >= 2 (got {})", n));
  if (!(capacity > 0.0) || !std::isfinite(capacity))
    throw InvalidInput(fmt::format("capacity must be > 0 (got {})", capacity));
  if (!(x_max > 0.0) || !std::isfinite(x_max))
    throw InvalidInput(fmt::format("x_max must be > 0 (got {})", x_max));
  if (!(beta > 1.0))
    throw InvalidInput(fmt::format("beta must be > 1 for the congestion dilemma (got {})", beta));
  if (!(beta < n))
    throw InvalidInput(fmt::format("requires beta < n (got beta={}, n={})", beta, n));
  if (!(n * x_max > capacity))
    throw InvalidInput(fmt::format("n * x_max must exceed capacity so overload is reachable "
                                   "(n={}, x_max={}, C={})",
                                   n, x_max, capacity));
  if (steps < 1) throw InvalidInput(fmt::format("T must be >= 1 (got {})", steps));
}

DemandProfile::DemandProfile(const GameConfig& cfg, std::vector<double> demands)
    : demands_(std::move(demands)) {
  if (demands_.size() != static_cast<std::size_t>(cfg.n))
    throw InvalidInput(
        fmt::format("demand profile has {} entries, expected n={}", demands_.size(), cfg.n));
  for (std::size_t i = 0; i < demands_.size(); ++i) {
    const double d = demands_[i];
    if (!std::isfinite(d) || d < 0.0 || d > cfg.x_max)
      throw InvalidInput(fmt::format("demand[{}]={} outside [0, {}]", i, d, cfg.x_max));
  }
}

double DemandProfile::total() const {
  return std::accumulate(demands_.begin(), demands_.end(), 0.0);
}

bool is_overloaded(double load, double capacity) {
  return load - capacity > kTolerance * std::max(1.0, std::abs(capacity));
}

double excess_load(double load, double capacity) { return std::max(0.0, load - capacity); }

double intrinsic_reward(const GameConfig& cfg, const DemandProfile& x, std::size_t i) {
  if (x.size() != static_cast<std::size_t>(cfg.n))
    throw InvalidInput("demand profile does not match agent count");
  if (i >= x.size())
    throw InvalidInput(fmt::format("agent index {} out of range [0, {})", i, x.size()));
  return x[i] - (cfg.beta / cfg.n) * excess_load(x.total(), cfg.capacity);
}

double welfare(const GameConfig& cfg, double load) {
  if (!(load >= 0.0)) throw InvalidInput(fmt::format("aggregate load must be >= 0 (got {})", load));
  return load - cfg.beta * excess_load(load, cfg.capacity);
}

StepRecord step(const GameConfig& cfg, int t, const DemandProfile& x) {
  StepRecord rec;
  rec.t = t;
  rec.demands.assign(x.values().begin(), x.values().end());
  rec.load = x.total();
  rec.rewards.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) rec.rewards.push_back(intrinsic_reward(cfg, x, i));
  rec.welfare = welfare(cfg, rec.load);
  rec.overloaded = is_overloaded(rec.load, cfg.capacity);
  return rec;
}

}  // namespace swa::game
