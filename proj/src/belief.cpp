#include "swa/belief.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "swa/error.h"

namespace swa::belief {

double BeliefParams::resolved_mu0(const game::GameConfig& cfg) const {
  return mu0 < 0.0 ? cfg.fair_share() : mu0;
}

void BeliefParams::validate(const game::GameConfig& cfg) const {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw InvalidInput(fmt::format("alpha must lie in (0, 1] (got {})", alpha));
  const double m = resolved_mu0(cfg);
  if (!(m >= 0.0 && m <= cfg.x_max))
    throw InvalidInput(fmt::format("mu0 must lie in [0, x_max={}] (got {})", cfg.x_max, m));
}

BeliefState BeliefParams::initial_state(const game::GameConfig& cfg) const {
  validate(cfg);
  return BeliefState{resolved_mu0(cfg), alpha, 0};
}

double GroupScoreConfig::resolved_w_ref(const game::GameConfig& cfg) const {
  return w_ref < 0.0 ? cfg.capacity : w_ref;
}

void GroupScoreConfig::validate(const game::GameConfig& cfg) const {
  if (!(resolved_w_ref(cfg) > 0.0)) throw InvalidInput("W_ref must be > 0");
  if (!(epsilon > 0.0)) throw InvalidInput(fmt::format("epsilon must be > 0 (got {})", epsilon));
  if (!(margin >= 0.0)) throw InvalidInput(fmt::format("margin must be >= 0 (got {})", margin));
  if (!(gamma_center >= 0.0))
    throw InvalidInput(fmt::format("gamma_center must be >= 0 (got {})", gamma_center));
  if (!(effective_capacity(cfg) > 0.0))
    throw InvalidInput(fmt::format("effective capacity C - margin must be > 0 (C={}, margin={})",
                                   cfg.capacity, margin));
}

BeliefState update_belief(const BeliefState& b, double xbar_prev, double x_max) {
  if (!std::isfinite(xbar_prev) || xbar_prev < 0.0 || xbar_prev > x_max)
    throw InvalidInput(fmt::format("observed mean demand {} outside [0, {}]", xbar_prev, x_max));
  if (!(b.alpha > 0.0 && b.alpha <= 1.0))
    throw InvalidInput(fmt::format("alpha must lie in (0, 1] (got {})", b.alpha));
  BeliefState next = b;
  next.mu = (1.0 - b.alpha) * b.mu + b.alpha * xbar_prev;
  // Convex combination; clamp only absorbs rounding at the interval ends.
  next.mu = std::clamp(next.mu, 0.0, x_max);
  next.updates = b.updates + 1;
  return next;
}

double predicted_total(const BeliefState& b, double candidate, const game::GameConfig& cfg) {
  if (!std::isfinite(candidate) || candidate < 0.0 || candidate > cfg.x_max)
    throw InvalidInput(fmt::format("candidate demand {} outside [0, {}]", candidate, cfg.x_max));
  return candidate + (cfg.n - 1) * b.mu;
}

double predicted_welfare(const game::GameConfig& cfg, const GroupScoreConfig& gsc,
                         double predicted_load) {
  if (!(predicted_load >= 0.0))
    throw InvalidInput(fmt::format("predicted load must be >= 0 (got {})", predicted_load));
  const double c_eff = gsc.effective_capacity(cfg);
  const double offset = predicted_load - c_eff;
  return predicted_load - cfg.beta * std::max(0.0, offset) - gsc.gamma_center * offset * offset;
}

double group_score(const game::GameConfig& cfg, const GroupScoreConfig& gsc,
                   double predicted_load) {
  const double w = predicted_welfare(cfg, gsc, predicted_load);
  return std::clamp(w / (gsc.resolved_w_ref(cfg) + gsc.epsilon), 0.0, 1.0);
}

}  // namespace swa::belief
