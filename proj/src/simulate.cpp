#include "sgdyn/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sgdyn/schedules.hpp"

namespace sgdyn {
namespace {

bool uses_epsilon(DynamicsKind kind) {
  return kind == DynamicsKind::ttfp_mf || kind == DynamicsKind::q_learning;
}

bool uses_tau(DynamicsKind kind) {
  return kind == DynamicsKind::individual_q || kind == DynamicsKind::decentralized_q;
}

void validate_config(const ExperimentConfig& config) {
  if (config.game == nullptr) throw ConfigError("experiment: no game attached");
  if (config.horizon < 1)
    throw ConfigError("experiment: horizon must be >= 1 (got " +
                      std::to_string(config.horizon) + ")");
  if (config.cadence < 1)
    throw ConfigError("experiment: cadence must be >= 1 (got " +
                      std::to_string(config.cadence) + ")");
  if (config.lambda) validate_lambda(*config.lambda, config.game->gamma);
}

// Counters must tile the run exactly: per-action counts partition each
// state's count, and state counts partition the elapsed steps.
void check_counters(const Agent& agent, long long k) {
  const AgentBelief& b = agent.belief();
  if (b.state_visits.empty()) return;  // kind keeps no counters (frozen)
  long long total = 0;
  for (std::size_t s = 0; s < b.state_visits.size(); ++s) {
    total += b.state_visits[s];
    if (!b.local_visits.empty()) {
      long long sum = 0;
      for (long long c : b.local_visits[s]) sum += c;
      if (sum != b.state_visits[s])
        throw std::logic_error("simulate: per-action counts do not tile the state count");
    }
    if (!b.joint_visits.empty()) {
      long long sum = 0;
      for (const auto& row : b.joint_visits[s])
        for (long long c : row) sum += c;
      if (sum != b.state_visits[s])
        throw std::logic_error("simulate: joint-action counts do not tile the state count");
    }
  }
  if (total != k)
    throw std::logic_error("simulate: state counts do not tile the elapsed steps");
}

}  // namespace

int sample_transition(const StochasticGame& game, int state, int a1, int a2,
                      RngStream& rng) {
  return rng.categorical(game.transitions[state][a1][a2]);
}

double discounted_return(const ExperimentTrace& trace, int player, double gamma) {
  double total = 0.0;
  double weight = 1.0;
  for (const StepRecord& rec : trace.steps) {
    total += weight * (player == 0 ? rec.r1 : rec.r2);
    weight *= gamma;
  }
  return total;
}

ExperimentTrace run(const ExperimentConfig& config) {
  validate_config(config);
  std::array<std::unique_ptr<Agent>, 2> agents = {
      make_agent(*config.game, 0, config.agents[0]),
      make_agent(*config.game, 1, config.agents[1]),
  };
  return run(config, agents);
}

ExperimentTrace run(const ExperimentConfig& config,
                    std::array<std::unique_ptr<Agent>, 2>& agents) {
  validate_config(config);
  const StochasticGame& game = *config.game;
  if (!agents[0] || !agents[1]) throw ConfigError("experiment: missing agent");

  DiagnosticOptions diag;
  diag.lambda = config.lambda ? *config.lambda : default_lambda(game.gamma);
  diag.tolerance = config.oracle_tolerance;
  for (int i = 0; i < 2; ++i) {
    if (uses_epsilon(config.agents[i].kind))
      diag.epsilon = std::max(diag.epsilon, config.agents[i].params.epsilon);
    if (uses_tau(config.agents[i].kind))
      diag.tau = std::max(diag.tau, config.agents[i].params.tau);
  }

  const EquilibriumSolution oracle = shapley_iterate(game, config.oracle_tolerance);

  RngStream env(substream_seed(config.seed, 0));
  RngStream stream1(substream_seed(config.seed, 1));
  RngStream stream2(substream_seed(config.seed, 2));

  ExperimentTrace trace;
  trace.horizon = config.horizon;
  trace.seed = config.seed;
  if (config.record_steps) trace.steps.reserve(static_cast<std::size_t>(config.horizon));

  int state = env.categorical(game.initial);
  double weight1 = 1.0;
  for (long long k = 0; k < config.horizon; ++k) {
    const int a1 = agents[0]->act(state, stream1);
    const int a2 = agents[1]->act(state, stream2);
    const double r1 = game.payoffs[0][state][a1][a2];
    const double r2 = game.payoffs[1][state][a1][a2];
    const int next = sample_transition(game, state, a1, a2, env);

    agents[0]->observe(make_observation(agents[0]->level(), state, a1, a2, r1, next));
    agents[1]->observe(make_observation(agents[1]->level(), state, a2, a1, r2, next));

    if (config.record_steps) trace.steps.push_back({k, state, a1, a2, r1, r2});
    trace.discounted_returns[0] += weight1 * r1;
    trace.discounted_returns[1] += weight1 * r2;
    weight1 *= game.gamma;

    const long long done = k + 1;
    if (done % config.cadence == 0 || done == config.horizon) {
      check_counters(*agents[0], done);
      check_counters(*agents[1], done);
      trace.snapshots.push_back(
          evaluate_snapshot(game, oracle, *agents[0], *agents[1], done, diag));
    }
    state = next;
  }
  return trace;
}

}  // namespace sgdyn
