#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace swa::game {

// Absolute/relative tolerance used for every floating-point equality
// decision in the environment (overload flag, conservation checks).
inline constexpr double kTolerance = 1e-9;

/// Environment constants of the shared-resource congestion game.
///
/// A config is only meaningful inside the social-dilemma regime: at least two
/// agents, 1 < beta < n, and enough per-agent headroom that n * x_max exceeds
/// the capacity. validate() enforces all of it.
struct GameConfig {
  int n = 5;
  double capacity = 20.0;
  double beta = 1.6;
  double x_max = 8.0;
  int steps = 20;

  void validate() const;
  double fair_share() const { return capacity / n; }
};

/// Per-agent demands, each within [0, x_max] for the config it was built with.
class DemandProfile {
 public:
  DemandProfile(const GameConfig& cfg, std::vector<double> demands);
  DemandProfile(const GameConfig& cfg, std::initializer_list<double> demands)
      : DemandProfile(cfg, std::vector<double>(demands)) {}

  std::span<const double> values() const { return demands_; }
  std::size_t size() const { return demands_.size(); }
  double operator[](std::size_t i) const { return demands_[i]; }
  double total() const;
  double mean() const { return total() / static_cast<double>(demands_.size()); }

 private:
  std::vector<double> demands_;
};

struct StepRecord {
  int t = 0;
  std::vector<double> demands;
  double load = 0.0;
  std::vector<double> rewards;
  double welfare = 0.0;
  bool overloaded = false;
};

// X > C, decided with kTolerance so that sums of grid values landing on the
// capacity are not flagged by rounding noise.
bool is_overloaded(double load, double capacity);

double excess_load(double load, double capacity);

/// x_i - (beta / n) * max(0, X - C). Agent indices are zero-based.
double intrinsic_reward(const GameConfig& cfg, const DemandProfile& x, std::size_t i);

/// X - beta * max(0, X - C). Peaks at X = C with value C when beta > 1.
double welfare(const GameConfig& cfg, double load);

StepRecord step(const GameConfig& cfg, int t, const DemandProfile& x);

}  // namespace swa::game
