// swa: command-line front end for the socially-weighted congestion simulator.
//
// Exit codes: 0 success, 2 invalid input/config, 3 agent bridge failure,
// 4 I/O error, 1 anything else.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "swa/bridge.h"
#include "swa/config.h"
#include "swa/engine.h"
#include "swa/error.h"
#include "swa/log.h"
#include "swa/plot.h"
#include "swa/results_io.h"
#include "swa/rng.h"
#include "swa/theory.h"

namespace {

using namespace swa;

/// Flag values as parsed by CLI11; lists stay strings until resolution.
struct RunFlags {
  std::string config_path;
  std::optional<int> n;
  std::optional<double> capacity;
  std::optional<double> beta;
  std::optional<std::string> betas;
  std::optional<double> x_max;
  std::optional<int> steps;
  std::optional<double> lambda;
  std::optional<std::string> lambdas;
  std::optional<std::string> seeds;
  std::optional<std::uint64_t> master_seed;
  std::optional<int> threads;
  std::optional<double> alpha;
  std::optional<double> mu0;
  std::optional<double> w_ref;
  std::optional<double> epsilon;
  std::optional<double> margin;
  std::optional<double> gamma_center;
  std::optional<std::string> variant;
  std::optional<std::string> source;
  std::optional<int> k;
  std::optional<std::string> agent_command;
  std::optional<int> bridge_timeout_ms;
  std::optional<int> handshake_timeout_ms;
  std::optional<std::string> out_dir;
  std::optional<std::string> prefix;
};

void add_run_flags(CLI::App& cmd, RunFlags& f, bool sweep) {
  cmd.add_option("-c,--config", f.config_path, "JSON config (or a previous run's .meta.json / .csv)");
  cmd.add_option("--n", f.n, "Number of agents");
  cmd.add_option("--C,--capacity", f.capacity, "Resource capacity");
  cmd.add_option("--beta", f.beta, "Congestion severity");
  cmd.add_option("--x-max", f.x_max, "Per-agent demand cap");
  cmd.add_option("--T,--steps", f.steps, "Steps per episode");
  if (sweep) {
    cmd.add_option("--betas", f.betas, "Comma-separated betas, e.g. 1.6,3");
    cmd.add_option("--lambdas", f.lambdas, "Comma-separated social weights");
  } else {
    cmd.add_option("--lambda", f.lambda, "Social weight in [0, 1]");
  }
  cmd.add_option("--seeds", f.seeds, "Comma-separated replicate labels (default 1..10)");
  cmd.add_option("--master-seed", f.master_seed, "Master seed for cell seed derivation");
  cmd.add_option("--threads", f.threads, "Worker threads for independent cells");
  cmd.add_option("--alpha", f.alpha, "EMA smoothing parameter in (0, 1]");
  cmd.add_option("--mu0", f.mu0, "Initial belief (default C/n)");
  cmd.add_option("--w-ref", f.w_ref, "Group score normalisation reference (default C)");
  cmd.add_option("--epsilon", f.epsilon, "Group score stability constant");
  cmd.add_option("--margin", f.margin, "Safety margin m (C_eff = C - m)");
  cmd.add_option("--gamma-center", f.gamma_center, "Capacity-centering strength");
  cmd.add_option("--variant", f.variant, "swi_normalized | exact_utility");
  cmd.add_option("--source", f.source, "Candidate source: grid | stochastic | external");
  cmd.add_option("--k", f.k, "Candidates per decision (before anchors)");
  cmd.add_option("--agent-cmd", f.agent_command, "Command for the external candidate agent");
  cmd.add_option("--bridge-timeout-ms", f.bridge_timeout_ms, "Per-step agent reply timeout");
  cmd.add_option("--handshake-timeout-ms", f.handshake_timeout_ms, "Agent hello timeout");
  cmd.add_option("-o,--out-dir", f.out_dir,
                 fmt::format("Output directory (default ${} or ./results)", config::kOutputDirEnv));
  cmd.add_option("--prefix", f.prefix, "Output file prefix");
}

config::RawConfig flags_to_raw(const RunFlags& f) {
  config::RawConfig raw;
  raw.n = f.n;
  raw.capacity = f.capacity;
  raw.x_max = f.x_max;
  raw.steps = f.steps;
  if (f.beta) {
    raw.beta = f.beta;
    raw.betas = std::vector<double>{*f.beta};
  }
  if (f.betas) raw.betas = config::parse_real_list(*f.betas);
  if (f.lambda) raw.lambdas = std::vector<double>{*f.lambda};
  if (f.lambdas) raw.lambdas = config::parse_real_list(*f.lambdas);
  if (f.seeds) raw.seeds = config::parse_seed_list(*f.seeds);
  raw.master_seed = f.master_seed;
  raw.threads = f.threads;
  raw.alpha = f.alpha;
  raw.mu0 = f.mu0;
  raw.w_ref = f.w_ref;
  raw.epsilon = f.epsilon;
  raw.margin = f.margin;
  raw.gamma_center = f.gamma_center;
  raw.variant = f.variant;
  raw.source = f.source;
  raw.k = f.k;
  raw.agent_command = f.agent_command;
  raw.bridge_timeout_ms = f.bridge_timeout_ms;
  raw.handshake_timeout_ms = f.handshake_timeout_ms;
  raw.output_dir = f.out_dir;
  raw.output_prefix = f.prefix;
  return raw;
}

config::ResolvedConfig resolve_flags(const RunFlags& f, const std::string& default_prefix) {
  config::RawConfig raw;
  if (!f.config_path.empty()) raw = config::load_config_file(f.config_path);
  raw.merge(flags_to_raw(f));
  return config::resolve(raw, default_prefix);
}

engine::SweepSpec make_spec(const config::ResolvedConfig& rc) {
  engine::SweepSpec spec = rc.to_sweep_spec();
  if (rc.source == policy::CandidateSource::kExternal) {
    const bridge::Timeouts timeouts{std::chrono::milliseconds(rc.handshake_timeout_ms),
                                    std::chrono::milliseconds(rc.bridge_timeout_ms)};
    spec.proposer_factory = [cmd = rc.agent_command, k = rc.k,
                             timeouts](const engine::EpisodeSetup& setup) {
      const bridge::HelloParams hello{setup.game.n, setup.game.capacity, setup.game.beta,
                                      setup.game.x_max, k};
      std::vector<int> ids;
      for (const auto& a : setup.agents) ids.push_back(a.id);
      return std::make_unique<bridge::AgentBridge>(cmd, hello, timeouts, ids);
    };
  }
  return spec;
}

void print_summary(const config::ResolvedConfig& rc, const engine::SweepResult& result) {
  const auto points = engine::summarize(result);
  std::cout << fmt::format("{:>6} {:>6} {:>22} {:>12} {:>12} {:>10}\n", "beta", "lambda",
                           "OR mean [min,max]", "W_mean", "dW_mean", "load");
  for (const auto& p : points) {
    std::cout << fmt::format("{:>6.2f} {:>6.2f} {:>8.3f} [{:.2f},{:.2f}] {:>12.4f} {:>12} {:>10.3f}\n",
                             p.beta, p.lambda, p.overload_rate.mean, p.overload_rate.min,
                             p.overload_rate.max, p.mean_welfare.mean,
                             p.delta_welfare ? fmt::format("{:.4f}", p.delta_welfare->mean) : "-",
                             p.mean_load.mean);
  }
  for (double beta : rc.betas) {
    const auto onset = engine::transition_lambda(points, beta);
    std::cout << fmt::format("beta={:g}: lambda_star = {:.6f}, empirical transition = {}\n", beta,
                             theory::critical_lambda(rc.game.n, beta),
                             onset ? fmt::format("{:.2f}", *onset) : "none");
  }
  if (rc.variant == policy::Variant::kExactUtility)
    std::cout << "note: exact_utility variant (theory validation agents, not normalised SWI)\n";
  if (const int fb = result.total_fallbacks(); fb > 0)
    log::warn(fmt::format("{} agent-step(s) fell back to the anchor set; see metadata", fb));
}

int cmd_run_or_sweep(const RunFlags& flags, const std::string& command) {
  const auto rc = resolve_flags(flags, command);
  const auto result = engine::run_sweep(make_spec(rc));
  const auto files = results::write_outputs(command, rc, result, command == "run");
  print_summary(rc, result);
  std::cout << "wrote " << files.csv.string() << "\n";
  std::cout << "wrote " << files.metadata.string() << "\n";
  if (files.steps) std::cout << "wrote " << files.steps->string() << "\n";
  return 0;
}

int cmd_threshold(int n, double beta) {
  const double lambda_star = theory::critical_lambda(n, beta);
  std::cout << fmt::format("lambda_star = {:.6f}\n", lambda_star);
  std::cout << fmt::format(
      "regime: social dilemma (1 < beta={:g} < n={}); overloaded agents keep a positive marginal "
      "incentive for lambda < lambda_star and none for lambda >= lambda_star\n",
      beta, n);
  return 0;
}

struct EquilibriumFlags {
  int n = 5;
  double capacity = 20.0;
  double beta = 1.6;
  double x_max = 8.0;
  double lambda = 0.0;
  std::size_t grid_points = 81;
  int max_rounds = 200;
  std::optional<std::string> initial;
  std::uint64_t seed = 1;
};

int cmd_equilibrium(const EquilibriumFlags& f) {
  theory::SwaParams p;
  p.lambda = f.lambda;
  p.cfg.n = f.n;
  p.cfg.capacity = f.capacity;
  p.cfg.beta = f.beta;
  p.cfg.x_max = f.x_max;
  p.validate();

  const auto grid = theory::uniform_grid(p.cfg, f.grid_points);
  std::vector<double> start;
  if (f.initial) {
    start = config::parse_real_list(*f.initial);
  } else {
    Rng rng(f.seed);
    for (int i = 0; i < f.n; ++i) start.push_back(grid[rng.next_u64() % grid.size()]);
  }
  const game::DemandProfile initial(p.cfg, start);
  const auto res = theory::best_response_dynamics(p, initial, grid, f.max_rounds);

  const auto& final_profile = res.final_profile();
  double load = 0.0;
  for (double x : final_profile) load += x;
  std::string profile_text;
  for (double x : final_profile) profile_text += fmt::format("{}{:.4f}", profile_text.empty() ? "" : ",", x);

  std::cout << fmt::format("lambda = {:.6f}, lambda_star = {:.6f}\n", f.lambda,
                           theory::critical_lambda(p.cfg));
  std::cout << fmt::format("marginal incentive (overloaded) = {:.6f}\n",
                           theory::marginal_incentive_overloaded(p));
  std::cout << fmt::format("converged = {}, rounds = {}\n", res.converged ? "true" : "false", res.rounds);
  std::cout << fmt::format("profile = {}\n", profile_text);
  std::cout << fmt::format("load X = {:.6f}, welfare W = {:.6f}, overloaded = {}\n", load,
                           game::welfare(p.cfg, load),
                           game::is_overloaded(load, p.cfg.capacity) ? "true" : "false");
  return 0;
}

int cmd_plot(const std::string& input, const std::string& kind_text, std::string output) {
  const auto kind = plot::parse_plot_kind(kind_text);
  const auto parsed = results::parse_csv(results::read_file(input));
  const auto out = plot::render_svg(parsed.rows, kind, parsed.config);
  for (const auto& w : out.warnings) log::warn(w);
  if (output.empty()) {
    std::filesystem::path p(input);
    p.replace_extension();
    output = p.string() + "." + std::string(plot::to_string(kind)) + ".svg";
  }
  results::write_file(output, out.svg);
  std::cout << "wrote " << output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Socially-weighted congestion game simulator"};
  app.set_version_flag("--version", swa::results::build_identifier());
  app.require_subcommand(1);

  int th_n = 5;
  double th_beta = 1.6;
  auto* threshold = app.add_subcommand("threshold", "Print the critical social weight (n - beta)/(n - 1)");
  threshold->add_option("--n", th_n, "Number of agents")->required();
  threshold->add_option("--beta", th_beta, "Congestion severity")->required();

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run episodes at a single lambda (one per seed)");
  add_run_flags(*run, run_flags, false);

  RunFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Sweep lambda x beta x seed and write results");
  add_run_flags(*sweep, sweep_flags, true);

  EquilibriumFlags eq;
  auto* equilibrium = app.add_subcommand("equilibrium", "Best-response dynamics on a demand grid");
  equilibrium->add_option("--n", eq.n, "Number of agents");
  equilibrium->add_option("--C,--capacity", eq.capacity, "Resource capacity");
  equilibrium->add_option("--beta", eq.beta, "Congestion severity");
  equilibrium->add_option("--x-max", eq.x_max, "Per-agent demand cap");
  equilibrium->add_option("--lambda", eq.lambda, "Social weight in [0, 1]");
  equilibrium->add_option("--grid-points", eq.grid_points, "Demand grid size on [0, x_max]");
  equilibrium->add_option("--max-rounds", eq.max_rounds, "Round limit");
  equilibrium->add_option("--initial", eq.initial, "Comma-separated initial profile");
  equilibrium->add_option("--seed", eq.seed, "Seed for a random initial profile");

  std::string plot_input, plot_kind = "overload_vs_lambda", plot_output;
  auto* plot_cmd = app.add_subcommand("plot", "Render an SVG from a results CSV");
  plot_cmd->add_option("-i,--input", plot_input, "Results CSV")->required();
  plot_cmd->add_option("--kind", plot_kind,
                       "overload_vs_lambda | welfare_vs_lambda | mean_welfare_vs_lambda");
  plot_cmd->add_option("-o,--output", plot_output, "SVG path (default derived from input)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*threshold) return cmd_threshold(th_n, th_beta);
    if (*run) return cmd_run_or_sweep(run_flags, "run");
    if (*sweep) return cmd_run_or_sweep(sweep_flags, "sweep");
    if (*equilibrium) return cmd_equilibrium(eq);
    if (*plot_cmd) return cmd_plot(plot_input, plot_kind, plot_output);
  } catch (const swa::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const swa::BridgeError& e) {
    std::cerr << "error: agent bridge: " << e.what() << "\n";
    return 3;
  } catch (const swa::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
