#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "swa/error.h"
#include "swa/game.h"

using namespace swa;
using game::DemandProfile;
using game::GameConfig;

namespace {

GameConfig cfg_with_beta(double beta) {
  GameConfig cfg;
  cfg.beta = beta;
  return cfg;
}

}  // namespace

TEST_CASE("intrinsic reward examples") {
  const GameConfig cfg;  // n=5, C=20, beta=1.6, x_max=8
  CHECK(game::intrinsic_reward(cfg, DemandProfile(cfg, {4, 4, 4, 4, 4}), 0) == doctest::Approx(4.0));
  CHECK(game::intrinsic_reward(cfg, DemandProfile(cfg, {5, 5, 5, 5, 5}), 0) == doctest::Approx(3.4));
  CHECK(game::intrinsic_reward(cfg, DemandProfile(cfg, {4, 5, 5, 5, 6}), 0) == doctest::Approx(2.4));
}

TEST_CASE("intrinsic reward rejects bad input") {
  const GameConfig cfg;
  const DemandProfile x(cfg, {1, 1, 1, 1, 1});
  CHECK_THROWS_AS(game::intrinsic_reward(cfg, x, 5), InvalidInput);
  CHECK_THROWS_AS(DemandProfile(cfg, {1, 1, 1, 1}), InvalidInput);
  CHECK_THROWS_AS(DemandProfile(cfg, {1, 1, 1, 1, 8.5}), InvalidInput);
  CHECK_THROWS_AS(DemandProfile(cfg, {1, 1, -0.1, 1, 1}), InvalidInput);
  CHECK_THROWS_AS(DemandProfile(cfg, {1, 1, NAN, 1, 1}), InvalidInput);

  GameConfig other = cfg;
  other.n = 4;
  CHECK_THROWS_AS(game::intrinsic_reward(other, x, 0), InvalidInput);
}

TEST_CASE("welfare examples") {
  CHECK(game::welfare(cfg_with_beta(1.6), 20) == doctest::Approx(20));
  CHECK(game::welfare(cfg_with_beta(1.6), 25) == doctest::Approx(17));
  CHECK(game::welfare(cfg_with_beta(3.0), 25) == doctest::Approx(10));
  CHECK_THROWS_AS(game::welfare(GameConfig{}, -1.0), InvalidInput);
}

TEST_CASE("step examples") {
  const GameConfig cfg;
  auto rec = game::step(cfg, 1, DemandProfile(cfg, {5, 5, 5, 5, 5}));
  CHECK(rec.load == doctest::Approx(25));
  CHECK(rec.welfare == doctest::Approx(17));
  CHECK(rec.overloaded);
  for (double r : rec.rewards) CHECK(r == doctest::Approx(3.4));

  rec = game::step(cfg, 2, DemandProfile(cfg, {0, 0, 0, 0, 0}));
  CHECK(rec.load == 0.0);
  CHECK(rec.welfare == 0.0);
  CHECK_FALSE(rec.overloaded);
  for (double r : rec.rewards) CHECK(r == 0.0);

  const auto severe = cfg_with_beta(3.0);
  rec = game::step(severe, 3, DemandProfile(severe, {8, 8, 8, 8, 8}));
  CHECK(rec.load == doctest::Approx(40));
  CHECK(rec.welfare == doctest::Approx(-20));
  for (double r : rec.rewards) CHECK(r == doctest::Approx(-4));
}

TEST_CASE("load exactly at capacity is not overload") {
  const GameConfig cfg;
  CHECK_FALSE(game::step(cfg, 1, DemandProfile(cfg, {4, 4, 4, 4, 4})).overloaded);
  // Sum of tenths that lands on C up to rounding.
  CHECK_FALSE(game::is_overloaded(0.1 * 3 + 19.7, 20.0));
  CHECK(game::is_overloaded(20.001, 20.0));
}

TEST_CASE("config validation") {
  GameConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.n = 1;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = GameConfig{};
  cfg.beta = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg.beta = 5.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = GameConfig{};
  cfg.x_max = 4.0;  // n * x_max == C: overload unreachable
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = GameConfig{};
  cfg.steps = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = GameConfig{};
  cfg.capacity = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
}

TEST_CASE("property: rewards add up to welfare, peers enter only through X") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 500; ++trial) {
    GameConfig cfg;
    cfg.n = std::uniform_int_distribution<int>(2, 12)(gen);
    cfg.beta = std::uniform_real_distribution<double>(1.01, cfg.n - 0.01)(gen);
    cfg.capacity = std::uniform_real_distribution<double>(1.0, 50.0)(gen);
    cfg.x_max = cfg.capacity / cfg.n * std::uniform_real_distribution<double>(1.1, 3.0)(gen);
    cfg.validate();

    std::uniform_real_distribution<double> demand(0.0, cfg.x_max);
    std::vector<double> xs(cfg.n);
    for (auto& x : xs) x = demand(gen);
    const DemandProfile x(cfg, xs);

    double sum = 0.0;
    for (int i = 0; i < cfg.n; ++i) sum += game::intrinsic_reward(cfg, x, i);
    const double w = game::welfare(cfg, x.total());
    CHECK(std::abs(sum - w) <= 1e-9 * std::max(1.0, std::abs(w)));

    // Permute peers of agent 0.
    std::vector<double> permuted = xs;
    std::shuffle(permuted.begin() + 1, permuted.end(), gen);
    CHECK(game::intrinsic_reward(cfg, DemandProfile(cfg, permuted), 0) ==
          doctest::Approx(game::intrinsic_reward(cfg, x, 0)).epsilon(1e-12));
  }
}

TEST_CASE("property: welfare is piecewise linear with the kink at C") {
  for (double beta : {1.2, 1.6, 3.0, 4.5}) {
    const auto cfg = cfg_with_beta(beta);
    const double h = 1e-3;
    for (double load = 0.5; load < 40.0; load += 0.37) {
      if (std::abs(load - cfg.capacity) < 10 * h) continue;
      const double slope = (game::welfare(cfg, load + h) - game::welfare(cfg, load - h)) / (2 * h);
      const double expected = load < cfg.capacity ? 1.0 : 1.0 - beta;
      CHECK(slope == doctest::Approx(expected).epsilon(1e-9));
    }
    // Peak value at capacity.
    CHECK(game::welfare(cfg, cfg.capacity) == doctest::Approx(cfg.capacity));
    CHECK(game::welfare(cfg, cfg.capacity + 1) < cfg.capacity);
    CHECK(game::welfare(cfg, cfg.capacity - 1) < cfg.capacity);
  }
}
