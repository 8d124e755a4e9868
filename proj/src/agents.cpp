#include "sgdyn/agents.hpp"

#include <cmath>
#include <stdexcept>

#include "sgdyn/matrix_game.hpp"

namespace sgdyn {

namespace {

int level_rank(ObservationLevel level) {
  switch (level) {
    case ObservationLevel::model_based: return 2;
    case ObservationLevel::model_free: return 1;
    case ObservationLevel::minimal: return 0;
  }
  return 0;
}

int own_actions(const StochasticGame& game, int player) {
  return game.action_counts[player];
}

// Experimental decay of a constant parameter in the agent's own step count.
double decayed(double base, const std::optional<double>& rho, long long k) {
  if (!rho) return base;
  return base / std::pow(static_cast<double>(k + 1), *rho);
}

int require_opponent_action(const Observation& obs, const char* who) {
  if (!obs.opponent_action)
    throw std::logic_error(std::string(who) + ": opponent action missing from observation");
  return *obs.opponent_action;
}

Mat transpose(const Mat& m) {
  if (m.empty()) return {};
  Mat out(m[0].size(), Vec(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) out[j][i] = m[i][j];
  return out;
}

StationaryStrategy greedy_strategy(const AgentBelief& belief, int states, int actions,
                                   int player) {
  StationaryStrategy strat;
  strat.rows = make_mat(states, actions);
  for (int s = 0; s < states; ++s)
    strat.rows[s][argmax_with_ties(expected_q_row(belief, s, player))] = 1.0;
  return strat;
}

class FpAgent final : public Agent {
 public:
  FpAgent(const StochasticGame& game, int player, ObservationLevel level)
      : stage_(game.stage_game(0)),
        player_(player),
        level_(level),
        belief_(make_fp_belief(game, player)) {}

  DynamicsKind kind() const override { return DynamicsKind::fp; }
  ObservationLevel level() const override { return level_; }
  const AgentBelief& belief() const override { return belief_; }

  int act(int, RngStream&) override { return fp_act(belief_.pi_hat[0], stage_, player_); }

  void observe(const Observation& obs) override {
    fp_observe(belief_.pi_hat[0], require_opponent_action(obs, "fp"), k_);
    k_ += 1;
    belief_.state_visits[0] += 1;
  }

  StationaryStrategy own_strategy_estimate() const override {
    StationaryStrategy strat;
    strat.rows = Mat(1, one_hot(static_cast<std::size_t>(stage_.action_counts[player_]),
                                static_cast<std::size_t>(fp_act(belief_.pi_hat[0], stage_, player_))));
    return strat;
  }

 private:
  StrategicFormGame stage_;
  int player_;
  ObservationLevel level_;
  AgentBelief belief_;
  long long k_ = 0;
};

class TtfpModelBasedAgent final : public Agent {
 public:
  TtfpModelBasedAgent(const StochasticGame& game, int player, ObservationLevel level,
                      const AgentParams& params)
      : game_(&game),
        player_(player),
        level_(level),
        params_(params),
        belief_(make_ttfp_belief(game, player, /*track_joint_visits=*/false)) {}

  DynamicsKind kind() const override { return DynamicsKind::ttfp_mb; }
  ObservationLevel level() const override { return level_; }
  const AgentBelief& belief() const override { return belief_; }

  int act(int state, RngStream&) override { return ttfp_act(belief_, state, player_); }

  void observe(const Observation& obs) override {
    ttfp_observe_model_based(belief_, *game_, player_, obs.state,
                             require_opponent_action(obs, "ttfp-mb"), params_.alpha,
                             params_.beta);
  }

  StationaryStrategy own_strategy_estimate() const override {
    return greedy_strategy(belief_, game_->states, own_actions(*game_, player_), player_);
  }

  std::optional<Vec> value_estimate() const override {
    Vec v(game_->states);
    for (int s = 0; s < game_->states; ++s) v[s] = belief_value(belief_, s, player_);
    return v;
  }

 private:
  const StochasticGame* game_;
  int player_;
  ObservationLevel level_;
  AgentParams params_;
  AgentBelief belief_;
};

class TtfpModelFreeAgent final : public Agent {
 public:
  TtfpModelFreeAgent(const StochasticGame& game, int player, ObservationLevel level,
                     const AgentParams& params)
      : states_(game.states),
        actions_(game.action_counts),
        gamma_(game.gamma),
        player_(player),
        level_(level),
        params_(params),
        belief_(make_ttfp_belief(game, player, /*track_joint_visits=*/true)) {}

  DynamicsKind kind() const override { return DynamicsKind::ttfp_mf; }
  ObservationLevel level() const override { return level_; }
  const AgentBelief& belief() const override { return belief_; }

  int act(int state, RngStream& rng) override {
    const double eps = decayed(params_.epsilon, params_.epsilon_decay_rho, k_);
    return ttfp_act(belief_, state, player_, eps, rng);
  }

  void observe(const Observation& obs) override {
    const int opp = require_opponent_action(obs, "ttfp-mf");
    TransitionRecord t;
    t.state = obs.state;
    t.a1 = player_ == 0 ? obs.own_action : opp;
    t.a2 = player_ == 0 ? opp : obs.own_action;
    t.reward = obs.reward;
    t.next_state = obs.next_state;
    ttfp_observe_model_free(belief_, player_, t, gamma_, params_.alpha, params_.beta);
    k_ += 1;
  }

  StationaryStrategy own_strategy_estimate() const override {
    return greedy_strategy(belief_, states_, actions_[player_], player_);
  }

  std::optional<Vec> value_estimate() const override {
    Vec v(states_);
    for (int s = 0; s < states_; ++s) v[s] = belief_value(belief_, s, player_);
    return v;
  }

 private:
  int states_;
  std::array<int, 2> actions_;
  double gamma_;
  int player_;
  ObservationLevel level_;
  AgentParams params_;
  AgentBelief belief_;
  long long k_ = 0;
};

class MinimaxQAgent final : public Agent {
 public:
  MinimaxQAgent(const StochasticGame& game, int player, ObservationLevel level,
                const AgentParams& params)
      : actions_(game.action_counts),
        gamma_(game.gamma),
        player_(player),
        level_(level),
        params_(params),
        belief_(make_minimax_q_belief(game)) {}

  DynamicsKind kind() const override { return DynamicsKind::minimax_q; }
  ObservationLevel level() const override { return level_; }
  const AgentBelief& belief() const override { return belief_; }

  // Uniform behavior policy; the update below does the learning.
  int act(int, RngStream& rng) override { return rng.uniform_int(actions_[player_]); }

  void observe(const Observation& obs) override {
    const int opp = require_opponent_action(obs, "minimax-q");
    const int a1 = player_ == 0 ? obs.own_action : opp;
    const int a2 = player_ == 0 ? opp : obs.own_action;
    minimax_q_update(belief_.q_joint, belief_.joint_visits, player_, obs.state, a1, a2,
                     obs.reward, obs.next_state, gamma_, params_.beta);
    belief_.state_visits[obs.state] += 1;
    belief_.joint_visits[obs.state][a1][a2] += 1;
  }

  StationaryStrategy own_strategy_estimate() const override {
    StationaryStrategy strat;
    strat.rows.reserve(belief_.q_joint.size());
    for (const Mat& stage : belief_.q_joint) {
      const Mat own_side = player_ == 0 ? stage : transpose(stage);
      strat.rows.push_back(solve_matrix_game(own_side).row_strategy);
    }
    return strat;
  }

  std::optional<Vec> value_estimate() const override {
    Vec v;
    v.reserve(belief_.q_joint.size());
    for (const Mat& stage : belief_.q_joint) {
      const Mat own_side = player_ == 0 ? stage : transpose(stage);
      v.push_back(solve_matrix_game(own_side).value);
    }
    return v;
  }

 private:
  std::array<int, 2> actions_;
  double gamma_;
  int player_;
  ObservationLevel level_;
  AgentParams params_;
  AgentBelief belief_;
};

class QLearningAgent final : public Agent {
 public:
  QLearningAgent(const StochasticGame& game, int player, ObservationLevel level,
                 const AgentParams& params)
      : gamma_(game.gamma),
        level_(level),
        params_(params),
        belief_(make_q_learning_belief(game, player)) {}

  DynamicsKind kind() const override { return DynamicsKind::q_learning; }
  ObservationLevel level() const override { return level_; }
  const AgentBelief& belief() const override { return belief_; }

  // Epsilon-greedy; the explore decision always consumes one draw, a
  // triggered exploration one more.
  int act(int state, RngStream& rng) override {
    const Vec& row = belief_.q_local.at(state);
    const double eps = decayed(params_.epsilon, params_.epsilon_decay_rho, k_);
    const double u = rng.uniform();
    if (u < eps) return rng.uniform_int(static_cast<int>(row.size()));
    return argmax_with_ties(row);
  }

  void observe(const Observation& obs) override {
    q_learning_update(belief_.q_local, belief_.local_visits, obs.state, obs.own_action,
                      obs.reward, obs.next_state, gamma_, params_.beta);
    belief_.state_visits[obs.state] += 1;
    belief_.local_visits[obs.state][obs.own_action] += 1;
    k_ += 1;
  }

  StationaryStrategy own_strategy_estimate() const override {
    StationaryStrategy strat;
    strat.rows.reserve(belief_.q_local.size());
    for (const Vec& row : belief_.q_local)
      strat.rows.push_back(one_hot(row.size(), static_cast<std::size_t>(argmax_with_ties(row))));
    return strat;
  }

  std::optional<Vec> value_estimate() const override {
    Vec v;
    v.reserve(belief_.q_local.size());
    for (const Vec& row : belief_.q_local) {
      double best = row.at(0);
      for (double x : row) best = std::max(best, x);
      v.push_back(best);
    }
    return v;
  }

 private:
  double gamma_;
  ObservationLevel level_;
  AgentParams params_;
  AgentBelief belief_;
  long long k_ = 0;
};

class IndividualQAgent final : public Agent {
 public:
  IndividualQAgent(const StochasticGame& game, int player, ObservationLevel level,
                   const AgentParams& params)
      : level_(level), params_(params) {
    const int actions = own_actions(game, player);
    belief_.q_local = make_mat(1, actions);
    belief_.pi_avg = Mat(1, uniform_distribution(actions));
    belief_.state_visits = CountVec(1, 0);
  }

  DynamicsKind kind() const override { return DynamicsKind::individual_q; }
  ObservationLevel level() const override { return level_; }
  const AgentBelief& belief() const override { return belief_; }

  int act(int, RngStream& rng) override {
    const Vec br = smoothed_best_response(belief_.q_local[0], tau_now());
    return rng.categorical(br);
  }

  void observe(const Observation& obs) override {
    const Vec br = smoothed_best_response(belief_.q_local[0], tau_now());
    individual_q_update(belief_.q_local[0], obs.own_action, obs.reward, br, params_.alpha, k_);
    averaged_strategy_update(belief_.pi_avg[0], br, params_.alpha.step(k_), true);
    k_ += 1;
    belief_.state_visits[0] += 1;
  }

  StationaryStrategy own_strategy_estimate() const override {
    StationaryStrategy strat;
    strat.rows = Mat(1, smoothed_best_response(belief_.q_local[0], tau_now()));
    return strat;
  }

  std::optional<Vec> value_estimate() const override {
    const Vec br = smoothed_best_response(belief_.q_local[0], tau_now());
    double v = 0.0;
    for (std::size_t a = 0; a < br.size(); ++a) v += br[a] * belief_.q_local[0][a];
    return Vec{v};
  }

 private:
  double tau_now() const { return decayed(params_.tau, params_.tau_decay_rho, k_); }

  ObservationLevel level_;
  AgentParams params_;
  AgentBelief belief_;
  long long k_ = 0;
};

class DecentralizedQAgent final : public Agent {
 public:
  DecentralizedQAgent(const StochasticGame& game, int player, ObservationLevel level,
                      const AgentParams& params)
      : gamma_(game.gamma),
        level_(level),
        params_(params),
        belief_(make_decentralized_q_belief(game, player)) {}

  DynamicsKind kind() const override { return DynamicsKind::decentralized_q; }
  ObservationLevel level() const override { return level_; }
  const AgentBelief& belief() const override { return belief_; }

  int act(int state, RngStream& rng) override {
    const Vec br = smoothed_best_response(belief_.q_local.at(state), tau_now());
    return rng.categorical(br);
  }

  void observe(const Observation& obs) override {
    const long long c_before = belief_.state_visits.at(obs.state);
    const Vec br =
        decentralized_q_observe(belief_, obs.state, obs.own_action, obs.reward,
                                obs.next_state, gamma_, params_.alpha, params_.beta, tau_now());
    averaged_strategy_update(belief_.pi_avg[obs.state], br, params_.alpha.step(c_before), true);
    k_ += 1;
  }

  StationaryStrategy own_strategy_estimate() const override {
    StationaryStrategy strat;
    strat.rows = belief_.pi_avg;
    return strat;
  }

  std::optional<Vec> value_estimate() const override { return belief_.v_hat; }

 private:
  double tau_now() const { return decayed(params_.tau, params_.tau_decay_rho, k_); }

  double gamma_;
  ObservationLevel level_;
  AgentParams params_;
  AgentBelief belief_;
  long long k_ = 0;
};

class FrozenAgent final : public Agent {
 public:
  FrozenAgent(StationaryStrategy strategy, ObservationLevel level)
      : strategy_(std::move(strategy)), level_(level) {}

  DynamicsKind kind() const override { return DynamicsKind::frozen; }
  ObservationLevel level() const override { return level_; }
  const AgentBelief& belief() const override { return belief_; }

  int act(int state, RngStream& rng) override {
    return rng.categorical(strategy_.rows.at(state));
  }

  void observe(const Observation&) override {}

  StationaryStrategy own_strategy_estimate() const override { return strategy_; }

 private:
  StationaryStrategy strategy_;
  ObservationLevel level_;
  AgentBelief belief_;  // intentionally empty
};

void require_single_state(const StochasticGame& game, const char* kind) {
  if (game.states != 1)
    throw ConfigError(std::string(kind) +
                      " is a strategic-form dynamic and requires a single-state game, got " +
                      std::to_string(game.states) + " states");
}

}  // namespace

std::string to_string(DynamicsKind kind) {
  switch (kind) {
    case DynamicsKind::fp: return "fp";
    case DynamicsKind::ttfp_mb: return "ttfp-mb";
    case DynamicsKind::ttfp_mf: return "ttfp-mf";
    case DynamicsKind::minimax_q: return "minimax-q";
    case DynamicsKind::q_learning: return "q-learning";
    case DynamicsKind::individual_q: return "individual-q";
    case DynamicsKind::decentralized_q: return "decentralized-q";
    case DynamicsKind::frozen: return "frozen";
  }
  return "unknown";
}

std::optional<DynamicsKind> parse_dynamics(const std::string& name) {
  if (name == "fp") return DynamicsKind::fp;
  if (name == "ttfp-mb") return DynamicsKind::ttfp_mb;
  if (name == "ttfp-mf") return DynamicsKind::ttfp_mf;
  if (name == "minimax-q") return DynamicsKind::minimax_q;
  if (name == "q-learning") return DynamicsKind::q_learning;
  if (name == "individual-q") return DynamicsKind::individual_q;
  if (name == "decentralized-q") return DynamicsKind::decentralized_q;
  if (name == "frozen") return DynamicsKind::frozen;
  return std::nullopt;
}

std::optional<ObservationLevel> parse_level(const std::string& name) {
  if (name == "model-based") return ObservationLevel::model_based;
  if (name == "model-free") return ObservationLevel::model_free;
  if (name == "minimal") return ObservationLevel::minimal;
  return std::nullopt;
}

ObservationLevel required_level(DynamicsKind kind) {
  switch (kind) {
    case DynamicsKind::fp:
    case DynamicsKind::ttfp_mb:
      return ObservationLevel::model_based;
    case DynamicsKind::ttfp_mf:
    case DynamicsKind::minimax_q:
      return ObservationLevel::model_free;
    case DynamicsKind::q_learning:
    case DynamicsKind::individual_q:
    case DynamicsKind::decentralized_q:
    case DynamicsKind::frozen:
      return ObservationLevel::minimal;
  }
  return ObservationLevel::minimal;
}

bool level_at_least(ObservationLevel level, ObservationLevel needed) {
  return level_rank(level) >= level_rank(needed);
}

Observation make_observation(ObservationLevel level, int state, int own_action,
                             int opponent_action, double own_reward, int next_state) {
  Observation obs;
  obs.state = state;
  obs.own_action = own_action;
  obs.reward = own_reward;
  obs.next_state = next_state;
  if (level_at_least(level, ObservationLevel::model_free))
    obs.opponent_action = opponent_action;
  return obs;
}

std::unique_ptr<Agent> make_agent(const StochasticGame& game, int player,
                                  const AgentSpec& spec) {
  if (player != 0 && player != 1)
    throw std::invalid_argument("make_agent: player must be 0 or 1");

  const ObservationLevel needed = required_level(spec.kind);
  const ObservationLevel level = spec.level.value_or(needed);
  if (!level_at_least(level, needed))
    throw ConfigError("dynamics " + to_string(spec.kind) + " requires observation level " +
                      to_string(needed) + " or above, got " + to_string(level));

  const AgentParams& p = spec.params;
  const auto check_epsilon = [&p] {
    if (!(p.epsilon >= 0.0 && p.epsilon <= 1.0))
      throw ConfigError("epsilon must lie in [0,1], got " + std::to_string(p.epsilon));
  };
  const auto check_tau = [&p] {
    if (!(p.tau > 0.0))
      throw ConfigError("tau must be positive, got " + std::to_string(p.tau));
  };
  if (p.epsilon_decay_rho && !(*p.epsilon_decay_rho > 0.0))
    throw ConfigError("epsilon decay exponent must be positive");
  if (p.tau_decay_rho && !(*p.tau_decay_rho > 0.0))
    throw ConfigError("tau decay exponent must be positive");
  if (spec.frozen && spec.kind != DynamicsKind::frozen)
    throw ConfigError("a frozen strategy was supplied for dynamics " + to_string(spec.kind));

  switch (spec.kind) {
    case DynamicsKind::fp:
      require_single_state(game, "fp");
      return std::make_unique<FpAgent>(game, player, level);
    case DynamicsKind::ttfp_mb:
      validate_schedule_pair(p.alpha, p.beta);
      return std::make_unique<TtfpModelBasedAgent>(game, player, level, p);
    case DynamicsKind::ttfp_mf:
      validate_schedule_pair(p.alpha, p.beta);
      check_epsilon();
      return std::make_unique<TtfpModelFreeAgent>(game, player, level, p);
    case DynamicsKind::minimax_q:
      validate_schedule(p.beta, "rho_beta");
      return std::make_unique<MinimaxQAgent>(game, player, level, p);
    case DynamicsKind::q_learning:
      validate_schedule(p.beta, "rho_beta");
      check_epsilon();
      return std::make_unique<QLearningAgent>(game, player, level, p);
    case DynamicsKind::individual_q:
      require_single_state(game, "individual-q");
      validate_schedule(p.alpha, "rho_alpha");
      check_tau();
      return std::make_unique<IndividualQAgent>(game, player, level, p);
    case DynamicsKind::decentralized_q:
      validate_schedule_pair(p.alpha, p.beta);
      check_tau();
      return std::make_unique<DecentralizedQAgent>(game, player, level, p);
    case DynamicsKind::frozen: {
      if (!spec.frozen) throw ConfigError("frozen dynamics needs a strategy to freeze");
      const StationaryStrategy& strat = *spec.frozen;
      if (static_cast<int>(strat.rows.size()) != game.states)
        throw ConfigError("frozen strategy has " + std::to_string(strat.rows.size()) +
                          " rows for a game with " + std::to_string(game.states) + " states");
      for (const Vec& row : strat.rows)
        if (static_cast<int>(row.size()) != game.action_counts[player])
          throw ConfigError("frozen strategy row width does not match the player's actions");
      if (!strat.valid())
        throw ConfigError("frozen strategy rows must be probability distributions");
      return std::make_unique<FrozenAgent>(strat, level);
    }
  }
  throw std::invalid_argument("make_agent: unknown dynamics kind");
}

}  // namespace sgdyn
