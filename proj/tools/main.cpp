#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgdyn/agents.hpp"
#include "sgdyn/artifacts.hpp"
#include "sgdyn/diagnostics.hpp"
#include "sgdyn/game.hpp"
#include "sgdyn/game_io.hpp"
#include "sgdyn/planning.hpp"
#include "sgdyn/schedules.hpp"
#include "sgdyn/simulate.hpp"

namespace {

using namespace sgdyn;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitParse = 3;
constexpr int kExitValidation = 4;
constexpr int kExitConfig = 5;

struct GameFlags {
  std::string source = "builtin:matching-pennies";
  double gamma = 0.5;  // discount for the builtin matrix embeddings
  int gen_states = 3;
  int gen_actions = 2;
  double gen_gamma = 0.5;
  std::string gen_class = "case-i";
  std::uint64_t gen_seed = 0;
};

struct RunFlags {
  GameFlags game;
  std::string dynamics = "ttfp-mb";
  std::string dynamics2;  // empty: same as seat 1
  std::string level;      // empty: least level the kind needs
  long long horizon = 10000;
  std::uint64_t seed = 0;
  double rho_alpha = kDefaultRhoAlpha;
  double rho_beta = kDefaultRhoBeta;
  double epsilon = 0.05;
  double tau = 0.1;
  std::optional<double> lambda;
  std::optional<double> epsilon_decay_rho;
  std::optional<double> tau_decay_rho;
  double tolerance = kPlanningTol;
  long long cadence = 1000;
  std::string out = "out";
};

struct SweepFlags {
  RunFlags base;
  std::vector<double> rho_alpha_grid{kDefaultRhoAlpha};
  std::vector<double> rho_beta_grid{kDefaultRhoBeta};
  std::vector<std::uint64_t> seeds{0};
};

void add_game_flags(CLI::App* cmd, GameFlags& g) {
  cmd->add_option("--game", g.source, "Game file path or builtin:{matching-pennies,rps,random-zs}")
      ->required();
  cmd->add_option("--gamma", g.gamma, "Discount for builtin matrix games");
  cmd->add_option("--gen-states", g.gen_states, "random-zs: number of states");
  cmd->add_option("--gen-actions", g.gen_actions, "random-zs: actions per player");
  cmd->add_option("--gen-gamma", g.gen_gamma, "random-zs: discount");
  cmd->add_option("--gen-class", g.gen_class, "random-zs: case-i or case-ii");
  cmd->add_option("--gen-seed", g.gen_seed, "random-zs: generator seed");
}

StochasticGame resolve_game(const GameFlags& flags) {
  const std::string prefix = "builtin:";
  if (flags.source.rfind(prefix, 0) != 0) return load_game_file(flags.source);

  const std::string name = flags.source.substr(prefix.size());
  if (name == "matching-pennies") return embed_matrix_game(matching_pennies_payoffs(), flags.gamma);
  if (name == "rps") return embed_matrix_game(rock_paper_scissors_payoffs(), flags.gamma);
  if (name == "random-zs") {
    GeneratorSpec spec;
    spec.states = flags.gen_states;
    spec.action_counts = {flags.gen_actions, flags.gen_actions};
    spec.gamma = flags.gen_gamma;
    if (flags.gen_class == "case-i")
      spec.target = ReachabilityTarget::case_i;
    else if (flags.gen_class == "case-ii")
      spec.target = ReachabilityTarget::case_ii;
    else
      throw ConfigError("unknown generator class '" + flags.gen_class + "'");
    return generate_game(spec, flags.gen_seed);
  }
  throw ConfigError("unknown builtin game '" + name + "'");
}

DynamicsKind resolve_dynamics(const std::string& name) {
  const auto kind = parse_dynamics(name);
  if (!kind) throw ConfigError("unknown dynamics '" + name + "'");
  return *kind;
}

AgentSpec agent_spec_from(const RunFlags& flags, const StochasticGame& game, int player,
                          const std::string& dynamics_name) {
  AgentSpec spec;
  spec.kind = resolve_dynamics(dynamics_name);
  if (!flags.level.empty()) {
    const auto level = parse_level(flags.level);
    if (!level) throw ConfigError("unknown observation level '" + flags.level + "'");
    spec.level = *level;
  }
  spec.params.alpha.rho = flags.rho_alpha;
  spec.params.beta.rho = flags.rho_beta;
  spec.params.epsilon = flags.epsilon;
  spec.params.tau = flags.tau;
  spec.params.epsilon_decay_rho = flags.epsilon_decay_rho;
  spec.params.tau_decay_rho = flags.tau_decay_rho;
  if (spec.kind == DynamicsKind::frozen)
    spec.frozen = StationaryStrategy::uniform(game.states, game.action_counts[player]);
  return spec;
}

nlohmann::json config_echo(const RunFlags& flags, const StochasticGame& game) {
  nlohmann::json j;
  j["game"] = flags.game.source;
  j["gamma"] = game.gamma;
  j["dynamics"] = flags.dynamics;
  j["dynamics2"] = flags.dynamics2.empty() ? flags.dynamics : flags.dynamics2;
  j["level"] = flags.level.empty() ? nlohmann::json(nullptr) : nlohmann::json(flags.level);
  j["horizon"] = flags.horizon;
  j["seed"] = flags.seed;
  j["rho_alpha"] = flags.rho_alpha;
  j["rho_beta"] = flags.rho_beta;
  j["epsilon"] = flags.epsilon;
  j["tau"] = flags.tau;
  j["lambda"] = flags.lambda ? nlohmann::json(*flags.lambda)
                             : nlohmann::json(default_lambda(game.gamma));
  j["tolerance"] = flags.tolerance;
  j["cadence"] = flags.cadence;
  if (flags.game.source == "builtin:random-zs") {
    j["gen_states"] = flags.game.gen_states;
    j["gen_actions"] = flags.game.gen_actions;
    j["gen_gamma"] = flags.game.gen_gamma;
    j["gen_class"] = flags.game.gen_class;
    j["gen_seed"] = flags.game.gen_seed;
  }
  return j;
}

ExperimentConfig experiment_config(const RunFlags& flags, const StochasticGame& game) {
  ExperimentConfig cfg;
  cfg.game = &game;
  cfg.agents[0] = agent_spec_from(flags, game, 0, flags.dynamics);
  cfg.agents[1] = agent_spec_from(flags, game, 1,
                                  flags.dynamics2.empty() ? flags.dynamics : flags.dynamics2);
  cfg.horizon = flags.horizon;
  cfg.seed = flags.seed;
  cfg.cadence = flags.cadence;
  cfg.oracle_tolerance = flags.tolerance;
  cfg.lambda = flags.lambda;
  return cfg;
}

// Runs one experiment and writes its three artifacts into `dir`.
nlohmann::json execute_run(const RunFlags& flags, const StochasticGame& game,
                           const fs::path& dir) {
  const ExperimentTrace trace = run(experiment_config(flags, game));
  nlohmann::json summary = summary_json(trace);
  summary["config"] = config_echo(flags, game);
  write_text_atomic(dir / "trace.csv", trace_csv(trace));
  write_text_atomic(dir / "snapshots.csv", snapshot_csv(trace));
  write_text_atomic(dir / "summary.json", summary.dump(2) + "\n");
  return summary;
}

void write_manifest(const fs::path& dir, const nlohmann::json& echo,
                    const std::vector<std::string>& artifacts, double duration_ms) {
  nlohmann::json m;
  m["config"] = echo;
  m["artifacts"] = artifacts;
  m["duration_ms"] = duration_ms;  // informational; not part of the determinism contract
  m["status"] = "ok";
  write_text_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

int cmd_solve(const GameFlags& game_flags, double tolerance, const std::string& out) {
  const StochasticGame game = resolve_game(game_flags);
  const EquilibriumSolution sol = shapley_iterate(game, tolerance);

  nlohmann::json j;
  j["states"] = game.states;
  j["gamma"] = game.gamma;
  j["residual"] = sol.residual;
  j["values"] = {sol.values[0], sol.values[1]};
  j["strategies"] = {sol.strategies[0].rows, sol.strategies[1].rows};
  write_text_atomic(fs::path(out) / "solution.json", j.dump(2) + "\n");

  std::cout << "states=" << game.states << " gamma=" << format_double(game.gamma)
            << " residual=" << format_double(sol.residual) << "\n";
  for (int i = 0; i < 2; ++i) {
    std::cout << "value[player " << (i + 1) << "] =";
    for (double v : sol.values[i]) std::cout << ' ' << format_double(v);
    std::cout << "\n";
  }
  std::cout << "wrote " << (fs::path(out) / "solution.json").string() << "\n";
  return kExitOk;
}

int cmd_run(const RunFlags& flags) {
  const auto t0 = std::chrono::steady_clock::now();
  const StochasticGame game = resolve_game(flags.game);
  const fs::path dir(flags.out);
  const nlohmann::json summary = execute_run(flags, game, dir);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(dir, summary.at("config"), {"trace.csv", "snapshots.csv", "summary.json"}, ms);

  std::cout << "final nash_gap = " << summary.at("final").at("nash_gap").dump()
            << "  (artifacts in " << dir.string() << ")\n";
  return kExitOk;
}

int sweep_thread_cap() {
  if (const char* env = std::getenv("SGDYN_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

int cmd_sweep(const SweepFlags& flags) {
  // Validate every grid point before any work starts.
  std::vector<std::pair<double, double>> grid;
  for (double ra : flags.rho_alpha_grid)
    for (double rb : flags.rho_beta_grid) {
      validate_schedule_pair(StepSchedule{ra}, StepSchedule{rb});
      grid.emplace_back(ra, rb);
    }
  std::sort(grid.begin(), grid.end());
  std::vector<std::uint64_t> seeds = flags.seeds;
  std::sort(seeds.begin(), seeds.end());

  const StochasticGame game = resolve_game(flags.base.game);
  const fs::path out(flags.base.out);

  struct Job {
    RunFlags flags;
    fs::path dir;
    nlohmann::json summary;
  };
  std::vector<Job> jobs;
  for (const auto& [ra, rb] : grid)
    for (std::uint64_t seed : seeds) {
      Job job;
      job.flags = flags.base;
      job.flags.rho_alpha = ra;
      job.flags.rho_beta = rb;
      job.flags.seed = seed;
      job.dir = out / ("ra" + format_double(ra) + "_rb" + format_double(rb) + "_seed" +
                       std::to_string(seed));
      jobs.push_back(std::move(job));
    }

  const int workers = std::min<int>(sweep_thread_cap(), static_cast<int>(jobs.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        jobs[i].summary = execute_run(jobs[i].flags, game, jobs[i].dir);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  // One row per job, already in sorted (grid point, seed) order.
  std::string csv =
      "rho_alpha,rho_beta,seed,nash_gap,V,Vstar,drift,q_err_p1,q_err_p2,v_err_p1,v_err_p2,"
      "return_p1,return_p2\n";
  const auto cell = [](const nlohmann::json& v) {
    return v.is_null() ? std::string() : format_double(v.get<double>());
  };
  for (const Job& job : jobs) {
    const nlohmann::json& fin = job.summary.at("final");
    csv += format_double(job.flags.rho_alpha) + ',' + format_double(job.flags.rho_beta) + ',' +
           std::to_string(job.flags.seed) + ',' + cell(fin.at("nash_gap")) + ',' +
           cell(fin.at("V")) + ',' + cell(fin.at("Vstar")) + ',' + cell(fin.at("drift")) + ',' +
           cell(fin.at("q_err_p1")) + ',' + cell(fin.at("q_err_p2")) + ',' +
           cell(fin.at("v_err_p1")) + ',' + cell(fin.at("v_err_p2")) + ',' +
           cell(job.summary.at("discounted_returns")[0]) + ',' +
           cell(job.summary.at("discounted_returns")[1]) + '\n';
  }
  write_text_atomic(out / "aggregate.csv", csv);
  std::cout << "wrote " << (out / "aggregate.csv").string() << " (" << jobs.size() << " rows)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning dynamics harness for two-player zero-sum stochastic games"};
  app.require_subcommand(1);

  GameFlags solve_game;
  double solve_tolerance = kPlanningTol;
  std::string solve_out = "out";
  CLI::App* solve = app.add_subcommand("solve", "Compute the equilibrium of a game");
  add_game_flags(solve, solve_game);
  solve->add_option("--tolerance", solve_tolerance, "Value accuracy");
  solve->add_option("--out", solve_out, "Output directory");

  RunFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one learning experiment");
  add_game_flags(run_cmd, run_flags.game);
  run_cmd->add_option("--dynamics", run_flags.dynamics, "Dynamics for both seats");
  run_cmd->add_option("--dynamics2", run_flags.dynamics2, "Override dynamics for seat 2");
  run_cmd->add_option("--level", run_flags.level, "Observation level for both seats");
  run_cmd->add_option("--horizon", run_flags.horizon, "Steps to run");
  run_cmd->add_option("--seed", run_flags.seed, "Master seed");
  run_cmd->add_option("--rho-alpha", run_flags.rho_alpha, "Strategy-timescale exponent");
  run_cmd->add_option("--rho-beta", run_flags.rho_beta, "Value-timescale exponent");
  run_cmd->add_option("--epsilon", run_flags.epsilon, "Exploration probability");
  run_cmd->add_option("--tau", run_flags.tau, "Logit temperature");
  double run_lambda = 0.0, run_eps_decay = 0.0, run_tau_decay = 0.0;
  CLI::Option* lambda_opt = run_cmd->add_option("--lambda", run_lambda, "Drift weighting");
  CLI::Option* eps_decay_opt =
      run_cmd
          ->add_option("--epsilon-decay-rho", run_eps_decay,
                       "Experimental: decay exponent for epsilon")
          ->group("Experimental");
  CLI::Option* tau_decay_opt =
      run_cmd->add_option("--tau-decay-rho", run_tau_decay, "Experimental: decay exponent for tau")
          ->group("Experimental");
  run_cmd->add_option("--tolerance", run_flags.tolerance, "Oracle accuracy");
  run_cmd->add_option("--cadence", run_flags.cadence, "Snapshot every this many steps");
  run_cmd->add_option("--out", run_flags.out, "Output directory");

  SweepFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep seeds and step-size exponents");
  add_game_flags(sweep, sweep_flags.base.game);
  sweep->add_option("--dynamics", sweep_flags.base.dynamics, "Dynamics for both seats");
  sweep->add_option("--dynamics2", sweep_flags.base.dynamics2, "Override dynamics for seat 2");
  sweep->add_option("--level", sweep_flags.base.level, "Observation level for both seats");
  sweep->add_option("--horizon", sweep_flags.base.horizon, "Steps per run");
  sweep->add_option("--epsilon", sweep_flags.base.epsilon, "Exploration probability");
  sweep->add_option("--tau", sweep_flags.base.tau, "Logit temperature");
  sweep->add_option("--tolerance", sweep_flags.base.tolerance, "Oracle accuracy");
  sweep->add_option("--cadence", sweep_flags.base.cadence, "Snapshot cadence");
  sweep->add_option("--out", sweep_flags.base.out, "Output directory");
  sweep->add_option("--seeds", sweep_flags.seeds, "Seed list")->delimiter(',');
  sweep->add_option("--rho-alpha-grid", sweep_flags.rho_alpha_grid, "Grid for rho_alpha")
      ->delimiter(',');
  sweep->add_option("--rho-beta-grid", sweep_flags.rho_beta_grid, "Grid for rho_beta")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand(solve)) return cmd_solve(solve_game, solve_tolerance, solve_out);
    if (app.got_subcommand(run_cmd)) {
      if (lambda_opt->count() > 0) run_flags.lambda = run_lambda;
      if (eps_decay_opt->count() > 0) run_flags.epsilon_decay_rho = run_eps_decay;
      if (tau_decay_opt->count() > 0) run_flags.tau_decay_rho = run_tau_decay;
      return cmd_run(run_flags);
    }
    if (app.got_subcommand(sweep)) return cmd_sweep(sweep_flags);
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
