#pragma once

#include "swa/game.h"

namespace swa::belief {

/// Exponential moving average of the public mean demand x̄.
///
/// Every agent observes the same x̄, so agents that share alpha and mu0 hold
/// identical beliefs. Each agent still owns its own state so heterogeneous
/// smoothing parameters can be configured.
struct BeliefState {
  double mu = 0.0;
  double alpha = 0.3;
  int updates = 0;
};

struct BeliefParams {
  double alpha = 0.3;
  // Initial estimate; negative means "use the fair share C / n".
  double mu0 = -1.0;

  BeliefState initial_state(const game::GameConfig& cfg) const;
  double resolved_mu0(const game::GameConfig& cfg) const;
  void validate(const game::GameConfig& cfg) const;
};

/// Normalisation and stabilisation knobs for the group score.
struct GroupScoreConfig {
  // Negative means "use the capacity C".
  double w_ref = -1.0;
  double epsilon = 1e-6;
  double margin = 0.0;
  double gamma_center = 0.0;

  double resolved_w_ref(const game::GameConfig& cfg) const;
  double effective_capacity(const game::GameConfig& cfg) const { return cfg.capacity - margin; }
  void validate(const game::GameConfig& cfg) const;
};

/// mu <- (1 - alpha) * mu + alpha * xbar_prev.
BeliefState update_belief(const BeliefState& b, double xbar_prev, double x_max);

/// a + (n - 1) * mu.
double predicted_total(const BeliefState& b, double candidate, const game::GameConfig& cfg);

/// Xhat - beta * max(0, Xhat - C_eff) - gamma_center * (Xhat - C_eff)^2.
double predicted_welfare(const game::GameConfig& cfg, const GroupScoreConfig& gsc,
                         double predicted_load);

/// clip_[0,1](predicted_welfare / (W_ref + epsilon)).
double group_score(const game::GameConfig& cfg, const GroupScoreConfig& gsc,
                   double predicted_load);

}  // namespace swa::belief
