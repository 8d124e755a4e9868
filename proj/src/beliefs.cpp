#include "sgdyn/beliefs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sgdyn/matrix_game.hpp"

namespace sgdyn {

namespace {

void update_pi_row(Vec& pi, int observed_action, double step) {
  if (observed_action < 0 || static_cast<std::size_t>(observed_action) >= pi.size())
    throw std::out_of_range("belief update: observed action out of range");
  for (std::size_t j = 0; j < pi.size(); ++j) {
    const double target = static_cast<int>(j) == observed_action ? 1.0 : 0.0;
    pi[j] += step * (target - pi[j]);
  }
}

Mat transpose(const Mat& m) {
  if (m.empty()) return {};
  Mat out(m[0].size(), Vec(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) out[j][i] = m[i][j];
  return out;
}

int own_action_count(const StochasticGame& game, int player) {
  return game.action_counts[player == 0 ? 0 : 1];
}

int opponent_action_count(const StochasticGame& game, int player) {
  return game.action_counts[player == 0 ? 1 : 0];
}

}  // namespace

std::string to_string(ObservationLevel level) {
  switch (level) {
    case ObservationLevel::model_based: return "model-based";
    case ObservationLevel::model_free: return "model-free";
    case ObservationLevel::minimal: return "minimal";
  }
  return "unknown";
}

AgentBelief make_fp_belief(const StochasticGame& game, int player) {
  AgentBelief b;
  b.pi_hat = Mat(1, uniform_distribution(opponent_action_count(game, player)));
  b.state_visits = CountVec(1, 0);
  return b;
}

AgentBelief make_ttfp_belief(const StochasticGame& game, int player, bool track_joint_visits) {
  AgentBelief b;
  b.pi_hat = Mat(game.states, uniform_distribution(opponent_action_count(game, player)));
  b.q_joint = make_tensor3(game.states, game.action_counts[0], game.action_counts[1]);
  b.state_visits = CountVec(game.states, 0);
  if (track_joint_visits)
    b.joint_visits = CountTensor3(
        game.states, CountMat(game.action_counts[0], CountVec(game.action_counts[1], 0)));
  return b;
}

AgentBelief make_minimax_q_belief(const StochasticGame& game) {
  AgentBelief b;
  b.q_joint = make_tensor3(game.states, game.action_counts[0], game.action_counts[1]);
  b.state_visits = CountVec(game.states, 0);
  b.joint_visits = CountTensor3(
      game.states, CountMat(game.action_counts[0], CountVec(game.action_counts[1], 0)));
  return b;
}

AgentBelief make_q_learning_belief(const StochasticGame& game, int player) {
  AgentBelief b;
  const int actions = own_action_count(game, player);
  b.q_local = make_mat(game.states, actions);
  b.state_visits = CountVec(game.states, 0);
  b.local_visits = CountMat(game.states, CountVec(actions, 0));
  return b;
}

AgentBelief make_decentralized_q_belief(const StochasticGame& game, int player) {
  AgentBelief b;
  const int actions = own_action_count(game, player);
  b.q_local = make_mat(game.states, actions);
  b.v_hat = Vec(game.states, 0.0);
  b.pi_avg = Mat(game.states, uniform_distribution(actions));
  b.state_visits = CountVec(game.states, 0);
  return b;
}

void fp_observe(Vec& pi_hat, int opponent_action, long long k) {
  update_pi_row(pi_hat, opponent_action, 1.0 / static_cast<double>(k + 1));
}

int fp_act(const Vec& pi_hat, const StrategicFormGame& game, int player) {
  const Side side = player == 0 ? Side::row : Side::col;
  return best_response(game.payoffs[player], pi_hat, side).chosen;
}

Vec expected_q_row(const AgentBelief& belief, int state, int player) {
  const Mat& q = belief.q_joint.at(state);
  const Vec& pi = belief.pi_hat.at(state);
  const std::size_t n1 = q.size();
  const std::size_t n2 = n1 == 0 ? 0 : q[0].size();
  if (player == 0) {
    if (pi.size() != n2) throw std::invalid_argument("expected_q_row: belief size mismatch");
    Vec out(n1, 0.0);
    for (std::size_t a1 = 0; a1 < n1; ++a1)
      for (std::size_t a2 = 0; a2 < n2; ++a2) out[a1] += pi[a2] * q[a1][a2];
    return out;
  }
  if (pi.size() != n1) throw std::invalid_argument("expected_q_row: belief size mismatch");
  Vec out(n2, 0.0);
  for (std::size_t a1 = 0; a1 < n1; ++a1)
    for (std::size_t a2 = 0; a2 < n2; ++a2) out[a2] += pi[a1] * q[a1][a2];
  return out;
}

double belief_value(const AgentBelief& belief, int state, int player) {
  const Vec row = expected_q_row(belief, state, player);
  double best = row.at(0);
  for (double v : row) best = std::max(best, v);
  return best;
}

int ttfp_act(const AgentBelief& belief, int state, int player) {
  return argmax_with_ties(expected_q_row(belief, state, player));
}

int ttfp_act(const AgentBelief& belief, int state, int player, double epsilon,
             RngStream& rng) {
  const double u = rng.uniform();
  if (u < epsilon) {
    const Mat& q = belief.q_joint.at(state);
    const int own = player == 0 ? static_cast<int>(q.size())
                                : static_cast<int>(q.empty() ? 0 : q[0].size());
    return rng.uniform_int(own);
  }
  return ttfp_act(belief, state, player);
}

void ttfp_observe_model_based(AgentBelief& belief, const StochasticGame& game,
                              int player, int state, int opponent_action,
                              const StepSchedule& alpha, const StepSchedule& beta) {
  const long long c = belief.state_visits.at(state);
  update_pi_row(belief.pi_hat.at(state), opponent_action, alpha.step(c));

  // One value vector shared by all joint targets: the q entries below must
  // not see each other's updates.
  Vec vhat(game.states);
  for (int s2 = 0; s2 < game.states; ++s2) vhat[s2] = belief_value(belief, s2, player);

  const double b = beta.step(c);
  const Tensor3& reward = game.payoffs[player];
  Mat& q_rows = belief.q_joint[state];
  for (int a1 = 0; a1 < game.action_counts[0]; ++a1) {
    for (int a2 = 0; a2 < game.action_counts[1]; ++a2) {
      const Vec& row = game.transitions[state][a1][a2];
      double cont = 0.0;
      for (int s2 = 0; s2 < game.states; ++s2) cont += row[s2] * vhat[s2];
      const double target = reward[state][a1][a2] + game.gamma * cont;
      q_rows[a1][a2] += b * (target - q_rows[a1][a2]);
    }
  }
  belief.state_visits[state] += 1;
}

void ttfp_observe_model_free(AgentBelief& belief, int player, const TransitionRecord& t,
                             double gamma, const StepSchedule& alpha,
                             const StepSchedule& beta) {
  const int opp_action = player == 0 ? t.a2 : t.a1;
  const long long cs = belief.state_visits.at(t.state);
  update_pi_row(belief.pi_hat.at(t.state), opp_action, alpha.step(cs));

  const long long csa = belief.joint_visits.at(t.state).at(t.a1).at(t.a2);
  const double target = t.reward + gamma * belief_value(belief, t.next_state, player);
  double& q = belief.q_joint[t.state][t.a1][t.a2];
  q += beta.step(csa) * (target - q);

  belief.state_visits[t.state] += 1;
  belief.joint_visits[t.state][t.a1][t.a2] += 1;
}

void q_learning_update(Mat& q_local, const CountMat& counters, int state, int action,
                       double reward, int next_state, double gamma,
                       const StepSchedule& beta) {
  const Vec& next_row = q_local.at(next_state);
  double best = next_row.at(0);
  for (double v : next_row) best = std::max(best, v);
  const double target = reward + gamma * best;
  double& q = q_local.at(state).at(action);
  q += beta.step(counters.at(state).at(action)) * (target - q);
}

void minimax_q_update(Tensor3& q_joint, const CountTensor3& counters, int player,
                      int state, int a1, int a2, double reward, int next_state,
                      double gamma, const StepSchedule& beta) {
  const Mat& next_stage = q_joint.at(next_state);
  const double val = player == 0 ? solve_matrix_game(next_stage).value
                                 : solve_matrix_game(transpose(next_stage)).value;
  const double target = reward + gamma * val;
  double& q = q_joint.at(state).at(a1).at(a2);
  q += beta.step(counters.at(state).at(a1).at(a2)) * (target - q);
}

Vec smoothed_best_response(const Vec& q, double tau) {
  if (!(tau > 0.0)) throw ConfigError("smoothed_best_response: tau must be positive");
  if (q.empty()) throw std::invalid_argument("smoothed_best_response: empty payoff vector");
  double m = q[0];
  for (double v : q) m = std::max(m, v);
  Vec out(q.size());
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    out[i] = std::exp((q[i] - m) / tau);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

void individual_q_update(Vec& q_row, int action, double reward, const Vec& br,
                         const StepSchedule& alpha, long long k) {
  const double p = br.at(action);
  if (!(p > 0.0))
    throw std::invalid_argument("individual_q_update: nonpositive best-response probability");
  const double step = std::min(1.0, alpha.step(k) / p);
  double& q = q_row.at(action);
  q += step * (reward - q);
}

Vec decentralized_q_observe(AgentBelief& belief, int state, int own_action,
                            double reward, int next_state, double gamma,
                            const StepSchedule& alpha, const StepSchedule& beta,
                            double tau) {
  const long long c = belief.state_visits.at(state);
  Vec& q_row = belief.q_local.at(state);
  const Vec q_before = q_row;  // the v target reads the pre-update row
  const Vec br = smoothed_best_response(q_before, tau);

  const double step = std::min(1.0, alpha.step(c) / br.at(own_action));
  const double target = reward + gamma * belief.v_hat.at(next_state);
  q_row.at(own_action) += step * (target - q_row[own_action]);

  double expected = 0.0;
  for (std::size_t a = 0; a < q_before.size(); ++a) expected += br[a] * q_before[a];
  double& v = belief.v_hat[state];
  v += beta.step(c) * (expected - v);

  belief.state_visits[state] += 1;
  return br;
}

void averaged_strategy_update(Vec& pi_avg_row, const Vec& br, double alpha,
                              bool is_current_state) {
  if (!is_current_state) return;
  if (pi_avg_row.size() != br.size())
    throw std::invalid_argument("averaged_strategy_update: size mismatch");
  for (std::size_t a = 0; a < pi_avg_row.size(); ++a)
    pi_avg_row[a] += alpha * (br[a] - pi_avg_row[a]);
}

}  // namespace sgdyn
