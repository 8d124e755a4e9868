#pragma once

#include <memory>
#include <optional>
#include <string>

#include "sgdyn/beliefs.hpp"
#include "sgdyn/game.hpp"
#include "sgdyn/rng.hpp"
#include "sgdyn/schedules.hpp"

namespace sgdyn {

enum class DynamicsKind {
  fp,
  ttfp_mb,
  ttfp_mf,
  minimax_q,
  q_learning,
  individual_q,
  decentralized_q,
  frozen,
};

std::string to_string(DynamicsKind kind);
std::optional<DynamicsKind> parse_dynamics(const std::string& name);
std::optional<ObservationLevel> parse_level(const std::string& name);

// Least informative level at which a dynamic can run.
ObservationLevel required_level(DynamicsKind kind);

// True when `level` delivers at least the information of `needed`.
bool level_at_least(ObservationLevel level, ObservationLevel needed);

// Tunables shared by the dynamics; fields a kind does not use are ignored.
struct AgentParams {
  StepSchedule alpha{kDefaultRhoAlpha};
  StepSchedule beta{kDefaultRhoBeta};
  double epsilon = 0.05;  // exploration probability
  double tau = 0.1;       // logit temperature
  // Experimental: scale epsilon or tau by 1/(k+1)^rho in the agent's own
  // completed-step count k. Off (unset) by default.
  std::optional<double> epsilon_decay_rho;
  std::optional<double> tau_decay_rho;
};

struct AgentSpec {
  DynamicsKind kind = DynamicsKind::ttfp_mb;
  // Defaults to the least level the kind needs.
  std::optional<ObservationLevel> level;
  AgentParams params;
  // Fixed stationary strategy; required iff kind == frozen.
  std::optional<StationaryStrategy> frozen;
};

// Per-step information delivered to an agent, already filtered by its
// observation level: opponent_action is set only at model_free and above.
struct Observation {
  int state = 0;
  int own_action = 0;
  std::optional<int> opponent_action;
  double reward = 0.0;  // own stage payoff
  int next_state = 0;
};

Observation make_observation(ObservationLevel level, int state, int own_action,
                             int opponent_action, double own_reward, int next_state);

// A learner bound to one seat of one game. act() may draw from the agent's
// dedicated stream; observe() is deterministic. The game passed to
// make_agent must outlive the agent.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual DynamicsKind kind() const = 0;
  virtual ObservationLevel level() const = 0;
  virtual int act(int state, RngStream& rng) = 0;
  virtual void observe(const Observation& obs) = 0;
  virtual const AgentBelief& belief() const = 0;

  // What the agent itself would play as a stationary strategy right now.
  virtual StationaryStrategy own_strategy_estimate() const = 0;
  // Per-state value estimate; empty when the kind carries none.
  virtual std::optional<Vec> value_estimate() const { return std::nullopt; }

  // Views into the belief; nullptr when the kind keeps no such component.
  const Mat* believed_opponent_strategy() const {
    return belief().pi_hat.empty() ? nullptr : &belief().pi_hat;
  }
  const Tensor3* joint_q() const {
    return belief().q_joint.empty() ? nullptr : &belief().q_joint;
  }
  const Mat* local_q() const {
    return belief().q_local.empty() ? nullptr : &belief().q_local;
  }
};

// Validates the spec against the game and seat (level pairing, schedule
// admissibility, parameter ranges, single-state requirement of the
// strategic-form dynamics) and builds the agent. Throws ConfigError.
std::unique_ptr<Agent> make_agent(const StochasticGame& game, int player,
                                  const AgentSpec& spec);

}  // namespace sgdyn
