#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "swa/error.h"
#include "swa/theory.h"

using namespace swa;
using game::DemandProfile;
using game::GameConfig;
using theory::SwaParams;

namespace {

SwaParams params(double lambda, double beta = 1.6, int n = 5) {
  SwaParams p;
  p.lambda = lambda;
  p.cfg.beta = beta;
  p.cfg.n = n;
  p.cfg.x_max = 2.0 * p.cfg.capacity / n;
  return p;
}

std::vector<double> integer_grid() { return {0, 1, 2, 3, 4, 5, 6, 7, 8}; }

// Independent oracle: spreads peers evenly over a full profile and evaluates
// the profile-based utility, keeping the first strict improvement.
double enumerate_best_response(const SwaParams& p, double peers_total, const std::vector<double>& grid) {
  const double each = peers_total / (p.cfg.n - 1);
  double best_a = grid.front();
  double best_u = -INFINITY;
  for (double a : grid) {
    std::vector<double> xs(p.cfg.n, each);
    xs[0] = a;
    const double u = theory::swa_utility(p, DemandProfile(p.cfg, xs), 0);
    if (u > best_u + 1e-9) {
      best_u = u;
      best_a = a;
    }
  }
  return best_a;
}

}  // namespace

TEST_CASE("swa utility examples") {
  const GameConfig cfg;
  const DemandProfile fives(cfg, {5, 5, 5, 5, 5});
  CHECK(theory::swa_utility(params(1.0), fives, 2) == doctest::Approx(3.4));
  CHECK(theory::swa_utility(params(0.5), fives, 0) == doctest::Approx(3.4));
  CHECK_THROWS_AS(theory::swa_utility(params(1.5), fives, 0), InvalidInput);
  CHECK_THROWS_AS(theory::swa_utility(params(-0.1), fives, 0), InvalidInput);
}

TEST_CASE("property: interpolation endpoints") {
  std::mt19937_64 gen(11);
  const GameConfig cfg;
  std::uniform_real_distribution<double> demand(0.0, cfg.x_max);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs(cfg.n);
    for (auto& x : xs) x = demand(gen);
    const DemandProfile x(cfg, xs);
    const auto i = static_cast<std::size_t>(trial % cfg.n);
    CHECK(theory::swa_utility(params(0.0), x, i) == game::intrinsic_reward(cfg, x, i));
    CHECK(theory::swa_utility(params(1.0), x, i) ==
          doctest::Approx(game::welfare(cfg, x.total()) / cfg.n).epsilon(1e-12));
  }
}

TEST_CASE("marginal incentive examples") {
  CHECK(theory::marginal_incentive_overloaded(params(0.0)) == doctest::Approx(0.68));
  CHECK(std::abs(theory::marginal_incentive_overloaded(params(0.85))) <= 1e-12);
  CHECK(theory::marginal_incentive_overloaded(params(1.0, 3.0)) == doctest::Approx(-0.4));
}

TEST_CASE("welfare gradient") {
  CHECK(theory::welfare_gradient(params(0, 1.6).cfg) == doctest::Approx(-0.6));
  CHECK(theory::welfare_gradient(params(0, 3.0).cfg) == doctest::Approx(-2.0));
  CHECK(std::abs(theory::welfare_gradient(params(0, 1.0 + 1e-9).cfg)) < 1e-8);
  CHECK_THROWS_AS(theory::welfare_gradient(params(0, 1.0).cfg), InvalidInput);
}

TEST_CASE("critical lambda") {
  CHECK(std::abs(theory::critical_lambda(5, 1.6) - 0.85) <= 1e-12);
  CHECK(std::abs(theory::critical_lambda(5, 3.0) - 0.5) <= 1e-12);
  const double ls10 = theory::critical_lambda(10, 1.6);
  CHECK(ls10 == doctest::Approx(8.4 / 9.0).epsilon(1e-14));
  // Cross-check by the sign of the overloaded marginal incentive.
  CHECK(theory::marginal_incentive_overloaded(params(ls10 - 1e-6, 1.6, 10)) > 0);
  CHECK(theory::marginal_incentive_overloaded(params(ls10 + 1e-6, 1.6, 10)) < 0);

  CHECK_THROWS_AS(theory::critical_lambda(5, 5.0), InvalidInput);
  CHECK_THROWS_AS(theory::critical_lambda(5, 1.0), InvalidInput);
  CHECK_THROWS_AS(theory::critical_lambda(1, 0.5), InvalidInput);
}

TEST_CASE("property: marginal incentive flips sign exactly at the critical lambda") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 50)(gen);
    const double beta = std::uniform_real_distribution<double>(1.0, n)(gen);
    if (!(beta > 1.0 && beta < n)) continue;
    const double ls = theory::critical_lambda(n, beta);
    REQUIRE(ls > 0.0);
    REQUIRE(ls < 1.0);
    for (int j = 0; j <= 20; ++j) {
      const double lambda = j / 20.0;
      const double m = theory::marginal_incentive_overloaded(params(lambda, beta, n));
      if (std::abs(lambda - ls) <= 1e-12) {
        CHECK(std::abs(m) <= 1e-12);
      } else if (lambda < ls) {
        CHECK(m > 0);
      } else {
        CHECK(m < 0);
      }
    }
    CHECK(std::abs(theory::marginal_incentive_overloaded(params(ls, beta, n))) <= 1e-12);
  }
}

TEST_CASE("property: finite-difference slopes match the analytic incentives") {
  std::mt19937_64 gen(99);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    SwaParams p;
    p.cfg.n = std::uniform_int_distribution<int>(2, 20)(gen);
    p.cfg.beta = std::uniform_real_distribution<double>(1.05, p.cfg.n - 0.05)(gen);
    p.cfg.capacity = std::uniform_real_distribution<double>(5.0, 50.0)(gen);
    p.cfg.x_max = 2.0 * p.cfg.capacity / p.cfg.n;
    p.lambda = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
    p.validate();

    // Overloaded: peers already past capacity minus a bit, own demand inside.
    {
      const double own = 0.5 * p.cfg.x_max;
      const double load = p.cfg.capacity + 0.25 * p.cfg.x_max;
      std::vector<double> xs(p.cfg.n, (load - own) / (p.cfg.n - 1));
      xs[0] = own;
      auto at = [&](double a) {
        auto v = xs;
        v[0] = a;
        return theory::swa_utility(p, DemandProfile(p.cfg, v), 0);
      };
      const double fd = (at(own + h) - at(own - h)) / (2 * h);
      CHECK(std::abs(fd - theory::marginal_incentive_overloaded(p)) <= 1e-6);
    }
    // Underloaded.
    {
      const double own = 0.5 * p.cfg.x_max;
      const double load = 0.5 * p.cfg.capacity;
      std::vector<double> xs(p.cfg.n, std::max(0.0, (load - own) / (p.cfg.n - 1)));
      xs[0] = own;
      auto at = [&](double a) {
        auto v = xs;
        v[0] = a;
        return theory::swa_utility(p, DemandProfile(p.cfg, v), 0);
      };
      const double fd = (at(own + h) - at(own - h)) / (2 * h);
      CHECK(std::abs(fd - theory::marginal_incentive_underloaded(p)) <= 1e-6);
      CHECK(fd > 0);
    }
  }
}

TEST_CASE("best response examples") {
  CHECK(theory::best_response(params(0.0), 32, integer_grid()) == 8);
  CHECK(theory::best_response(params(1.0), 16, integer_grid()) == 4);
  // At the threshold utility is flat above the kink: the tie rule lands on X = C.
  const double ls = theory::critical_lambda(5, 1.6);
  CHECK(theory::best_response(params(ls), 17, integer_grid()) == 3);
  CHECK(theory::best_response(params(ls), 12, integer_grid()) == 8);
  // Peers alone exceed C: welfare-driven agents abstain.
  CHECK(theory::best_response(params(1.0), 24, integer_grid()) == 0);
  CHECK_THROWS_AS(theory::best_response(params(0.5), 10, std::vector<double>{}), InvalidInput);
}

TEST_CASE("property: best response matches an independent enumeration") {
  std::mt19937_64 gen(5);
  const std::vector<double> grid = theory::uniform_grid(GameConfig{}, 17);
  for (int trial = 0; trial < 300; ++trial) {
    const double beta = std::uniform_real_distribution<double>(1.05, 4.95)(gen);
    const double lambda = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
    const double peers = std::uniform_real_distribution<double>(0.0, 32.0)(gen);
    const auto p = params(lambda, beta);
    CHECK(theory::best_response(p, peers, grid) == enumerate_best_response(p, peers, grid));
  }
}

TEST_CASE("default grid has 81 points with capacity fair share on it") {
  const auto grid = theory::uniform_grid(GameConfig{});
  REQUIRE(grid.size() == 81);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 8.0);
  CHECK(grid[40] == 4.0);
  CHECK(grid[1] == doctest::Approx(0.1));
}

TEST_CASE("best-response dynamics: selfish agents saturate") {
  std::mt19937_64 gen(3);
  const auto p = params(0.0);
  const auto grid = theory::uniform_grid(p.cfg);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> start(5);
    for (auto& x : start) x = grid[gen() % grid.size()];
    const auto res = theory::best_response_dynamics(p, DemandProfile(p.cfg, start), grid, 50);
    CHECK(res.converged);
    for (double x : res.final_profile()) CHECK(x == 8.0);
  }
}

TEST_CASE("best-response dynamics: welfare-driven agents fill capacity exactly") {
  std::mt19937_64 gen(4);
  const auto p = params(1.0);
  const auto grid = theory::uniform_grid(p.cfg);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> start(5);
    for (auto& x : start) x = grid[gen() % grid.size()];
    const auto res = theory::best_response_dynamics(p, DemandProfile(p.cfg, start), grid, 50);
    CHECK(res.converged);
    double load = 0;
    for (double x : res.final_profile()) load += x;
    CHECK(load == doctest::Approx(20.0).epsilon(1e-9));
  }
}

TEST_CASE("best-response dynamics: just below the threshold still saturates") {
  const auto p = params(0.84);
  const auto grid = theory::uniform_grid(p.cfg);
  const auto res = theory::best_response_dynamics(p, DemandProfile(p.cfg, {0, 2, 4, 6, 8}), grid, 50);
  CHECK(res.converged);
  for (double x : res.final_profile()) CHECK(x == 8.0);
}

TEST_CASE("best-response dynamics reports non-convergence through the flag") {
  const auto p = params(0.0);
  const auto grid = theory::uniform_grid(p.cfg);
  const auto res = theory::best_response_dynamics(p, DemandProfile(p.cfg, {0, 0, 0, 0, 0}), grid, 1);
  CHECK_FALSE(res.converged);
  CHECK(res.rounds == 1);
  CHECK(res.history.size() == 2);
}
