#include "swa/engine.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "swa/error.h"
#include "swa/log.h"
#include "swa/rng.h"

namespace swa::engine {

void EpisodeSetup::validate() const {
  game.validate();
  if (agents.size() != static_cast<std::size_t>(game.n))
    throw InvalidInput(
        fmt::format("expected {} agent specs, got {}", game.n, agents.size()));
  for (const auto& a : agents) a.validate();
  group.validate(game);
  belief.validate(game);
}

std::vector<policy::AgentSpec> homogeneous_agents(int n, double lambda, policy::Variant variant,
                                                  policy::CandidateSource source, int k) {
  std::vector<policy::AgentSpec> agents;
  agents.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    agents.push_back(policy::AgentSpec{i, lambda, variant, source, k, static_cast<std::uint64_t>(i)});
  }
  return agents;
}

EpisodeResult run_episode(const EpisodeSetup& setup, std::uint64_t seed,
                          CandidateProposer* proposer) {
  setup.validate();
  const auto& cfg = setup.game;
  const bool needs_bridge =
      std::any_of(setup.agents.begin(), setup.agents.end(), [](const policy::AgentSpec& a) {
        return a.source == policy::CandidateSource::kExternal;
      });
  if (needs_bridge && proposer == nullptr)
    throw InvalidInput("external candidate source requires an agent bridge command");

  const std::size_t n = setup.agents.size();
  std::vector<Rng> rngs;
  std::vector<belief::BeliefState> beliefs;
  rngs.reserve(n);
  beliefs.reserve(n);
  for (const auto& a : setup.agents) {
    rngs.emplace_back(derive_stream_seed(seed, a.rng_seed));
    belief::BeliefState b = setup.belief.initial_state(cfg);
    beliefs.push_back(b);
  }

  EpisodeResult out;
  out.setup = setup;
  out.seed = seed;
  out.records.reserve(static_cast<std::size_t>(cfg.steps));

  for (int t = 1; t <= cfg.steps; ++t) {
    std::vector<double> demands(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& spec = setup.agents[i];
      std::optional<std::vector<double>> external;
      if (spec.source == policy::CandidateSource::kExternal) {
        ProposeRequest req{t, spec.id, beliefs[i].mu, std::nullopt, std::nullopt};
        if (!out.records.empty()) {
          req.last_load = out.records.back().load;
          req.last_reward = out.records.back().rewards[i];
        }
        external = proposer->propose(req);
      }
      auto generated = policy::generate_candidates(spec, cfg, rngs[i], external);
      if (generated.fallback) {
        ++out.fallbacks;
        log::warn(fmt::format("agent {} step {}: no usable external candidates, using anchors",
                              spec.id, t));
      }
      demands[i] = policy::select_swi(spec, cfg, setup.group, beliefs[i], generated.set).chosen;
    }

    out.records.push_back(game::step(cfg, t, game::DemandProfile(cfg, std::move(demands))));
    const double mean_demand =
        std::clamp(out.records.back().load / static_cast<double>(n), 0.0, cfg.x_max);
    for (auto& b : beliefs) b = belief::update_belief(b, mean_demand, cfg.x_max);
  }

  int overloaded = 0;
  double welfare_sum = 0.0;
  double load_sum = 0.0;
  for (const auto& r : out.records) {
    overloaded += r.overloaded ? 1 : 0;
    welfare_sum += r.welfare;
    load_sum += r.load;
  }
  const double steps = static_cast<double>(out.records.size());
  out.overload_rate = overloaded / steps;
  out.mean_welfare = welfare_sum / steps;
  out.mean_load = load_sum / steps;
  return out;
}

std::uint64_t derive_cell_seed(std::uint64_t master_seed, std::size_t lambda_index,
                               std::size_t beta_index, std::size_t seed_index) {
  constexpr std::size_t kLimit = std::size_t{1} << 21;
  if (lambda_index >= kLimit || beta_index >= kLimit || seed_index >= kLimit)
    throw InvalidInput("sweep grid index exceeds 2^21");
  const std::uint64_t counter = (static_cast<std::uint64_t>(lambda_index) << 42) |
                                (static_cast<std::uint64_t>(beta_index) << 21) |
                                static_cast<std::uint64_t>(seed_index);
  return splitmix64_mix(master_seed + kGoldenGamma * (counter + 1));
}

void SweepSpec::validate() const {
  if (lambdas.empty()) throw InvalidInput("sweep needs at least one lambda");
  if (betas.empty()) throw InvalidInput("sweep needs at least one beta");
  if (seeds.empty()) throw InvalidInput("sweep needs at least one seed");
  for (double l : lambdas)
    if (!(l >= 0.0 && l <= 1.0))
      throw InvalidInput(fmt::format("lambda must lie in [0, 1] (got {})", l));
  for (std::size_t b = 0; b < betas.size(); ++b) cell_setup(*this, 0, b).validate();
  if (threads < 1) throw InvalidInput("threads must be >= 1");
}

EpisodeSetup cell_setup(const SweepSpec& spec, std::size_t lambda_index, std::size_t beta_index) {
  EpisodeSetup setup = spec.base;
  setup.game.beta = spec.betas.at(beta_index);
  for (auto& a : setup.agents) a.lambda = spec.lambdas.at(lambda_index);
  return setup;
}

EpisodeResult run_cell(const SweepSpec& spec, std::size_t lambda_index, std::size_t beta_index,
                       std::size_t seed_index) {
  const EpisodeSetup setup = cell_setup(spec, lambda_index, beta_index);
  const std::uint64_t seed = derive_cell_seed(spec.master_seed, lambda_index, beta_index, seed_index);
  if (spec.proposer_factory) {
    auto proposer = spec.proposer_factory(setup);
    return run_episode(setup, seed, proposer.get());
  }
  return run_episode(setup, seed);
}

int SweepResult::total_fallbacks() const {
  int total = 0;
  for (const auto& c : cells)
    if (c.episode) total += c.episode->fallbacks;
  return total;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();

  SweepResult out;
  for (std::size_t b = 0; b < spec.betas.size(); ++b) {
    for (std::size_t l = 0; l < spec.lambdas.size(); ++l) {
      for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
        SweepCell cell;
        cell.lambda_index = l;
        cell.beta_index = b;
        cell.seed_index = s;
        cell.lambda = spec.lambdas[l];
        cell.beta = spec.betas[b];
        cell.seed_label = spec.seeds[s];
        cell.cell_seed = derive_cell_seed(spec.master_seed, l, b, s);
        out.cells.push_back(std::move(cell));
      }
    }
  }

  auto run_one = [&spec](SweepCell& cell) {
    try {
      cell.episode = run_cell(spec, cell.lambda_index, cell.beta_index, cell.seed_index);
    } catch (const BridgeError&) {
      throw;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  };

  const bool sequential = spec.threads <= 1 || static_cast<bool>(spec.proposer_factory);
  if (sequential) {
    for (auto& cell : out.cells) run_one(cell);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;
    std::vector<std::thread> workers;
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(spec.threads), out.cells.size());
    for (std::size_t w = 0; w < count; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < out.cells.size(); i = next++) {
          try {
            run_one(out.cells[i]);
          } catch (...) {
            std::lock_guard lock(fatal_mutex);
            if (!fatal) fatal = std::current_exception();
          }
        }
      });
    }
    for (auto& w : workers) w.join();
    if (fatal) std::rethrow_exception(fatal);
  }

  const auto zero = std::find(spec.lambdas.begin(), spec.lambdas.end(), 0.0);
  out.has_baseline = zero != spec.lambdas.end();
  if (!out.has_baseline) {
    out.warnings.push_back("lambda = 0 is not in the sweep; delta_welfare omitted");
    log::warn(out.warnings.back());
  } else {
    const auto zero_index = static_cast<std::size_t>(zero - spec.lambdas.begin());
    std::map<std::pair<std::size_t, std::size_t>, double> baseline;
    for (const auto& c : out.cells)
      if (c.lambda_index == zero_index && c.episode)
        baseline[{c.beta_index, c.seed_index}] = c.episode->mean_welfare;
    for (auto& c : out.cells) {
      auto it = baseline.find({c.beta_index, c.seed_index});
      if (it == baseline.end() || !c.episode) continue;
      c.baseline_welfare = it->second;
      c.delta_welfare = c.lambda_index == zero_index ? 0.0 : c.episode->mean_welfare - it->second;
    }
  }

  for (const auto& c : out.cells) {
    if (!c.error.empty()) {
      out.warnings.push_back(fmt::format("cell lambda={} beta={} seed={} failed: {}", c.lambda,
                                         c.beta, c.seed_label, c.error));
      log::warn(out.warnings.back());
    }
  }
  return out;
}

namespace {

Band make_band(const std::vector<double>& v) {
  Band b;
  b.count = v.size();
  if (v.empty()) return b;
  double sum = 0.0;
  b.min = v.front();
  b.max = v.front();
  for (double x : v) {
    sum += x;
    b.min = std::min(b.min, x);
    b.max = std::max(b.max, x);
  }
  b.mean = sum / static_cast<double>(v.size());
  return b;
}

}  // namespace

std::vector<PointSummary> summarize(const SweepResult& result) {
  struct Acc {
    std::vector<double> overload, welfare, delta, load;
  };
  std::map<std::pair<double, double>, Acc> groups;
  for (const auto& c : result.cells) {
    if (!c.episode) continue;
    auto& acc = groups[{c.beta, c.lambda}];
    acc.overload.push_back(c.episode->overload_rate);
    acc.welfare.push_back(c.episode->mean_welfare);
    acc.load.push_back(c.episode->mean_load);
    if (c.delta_welfare) acc.delta.push_back(*c.delta_welfare);
  }

  std::vector<PointSummary> out;
  for (const auto& [key, acc] : groups) {
    PointSummary p;
    p.beta = key.first;
    p.lambda = key.second;
    p.overload_rate = make_band(acc.overload);
    p.mean_welfare = make_band(acc.welfare);
    p.mean_load = make_band(acc.load);
    if (!acc.delta.empty()) p.delta_welfare = make_band(acc.delta);
    out.push_back(p);
  }
  return out;
}

std::optional<double> transition_lambda(const std::vector<PointSummary>& points, double beta,
                                        double level) {
  std::vector<const PointSummary*> row;
  for (const auto& p : points)
    if (p.beta == beta) row.push_back(&p);
  std::sort(row.begin(), row.end(),
            [](const PointSummary* a, const PointSummary* b) { return a->lambda < b->lambda; });

  std::optional<double> onset;
  for (auto it = row.rbegin(); it != row.rend(); ++it) {
    if ((*it)->overload_rate.mean > level) break;
    onset = (*it)->lambda;
  }
  return onset;
}

}  // namespace swa::engine
