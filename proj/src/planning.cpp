#include "sgdyn/planning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sgdyn/matrix_game.hpp"

namespace sgdyn {
namespace {

void check_player(int player) {
  if (player != 0 && player != 1)
    throw std::invalid_argument("player index must be 0 or 1");
}

void check_valid(const StochasticGame& game, const char* who) {
  const ValidationReport rep = validate_game(game);
  if (!rep.valid())
    throw std::invalid_argument(std::string(who) + ": invalid game:\n" + rep.to_string());
}

Mat transposed(const Mat& m) {
  Mat t(m[0].size(), Vec(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  return t;
}

// Stage matrix u(a1,a2) = r_i(s,a) + gamma * sum_s' p(s'|s,a) v(s').
Mat stage_matrix(const StochasticGame& game, int player, int s, const Vec& v) {
  const int A1 = game.action_counts[0];
  const int A2 = game.action_counts[1];
  Mat u = make_mat(A1, A2);
  for (int a1 = 0; a1 < A1; ++a1)
    for (int a2 = 0; a2 < A2; ++a2) {
      double cont = 0.0;
      for (int t = 0; t < game.states; ++t)
        cont += game.transitions[s][a1][a2][t] * v[t];
      u[a1][a2] = game.payoffs[player][s][a1][a2] + game.gamma * cont;
    }
  return u;
}

// Minimax value of the stage matrix from `player`'s standpoint. Player 0
// maximizes over rows; player 1 maximizes her own payoff over columns, which
// is the row value of the transposed matrix.
double stage_value(const Mat& u, int player) {
  return player == 0 ? solve_matrix_game(u).value
                     : solve_matrix_game(transposed(u)).value;
}

Vec stage_strategy(const Mat& u, int player) {
  return player == 0 ? solve_matrix_game(u).row_strategy
                     : solve_matrix_game(transposed(u)).row_strategy;
}

Vec apply_value_operator(const StochasticGame& game, int player, const Vec& v) {
  Vec out(game.states);
  for (int s = 0; s < game.states; ++s)
    out[s] = stage_value(stage_matrix(game, player, s, v), player);
  return out;
}

// Stop threshold turning the a-posteriori contraction bound
// |v_n - v*| <= gamma/(1-gamma) * |v_n - v_{n-1}| into |v - v*| <= tol while
// also keeping the Bellman residual of the returned iterate within tol.
double stop_threshold(double gamma, double tolerance) {
  return tolerance * std::min(1.0, (1.0 - gamma) / gamma);
}

Tensor3 lift_q(const StochasticGame& game, int player, const Vec& v) {
  const int A1 = game.action_counts[0];
  const int A2 = game.action_counts[1];
  Tensor3 q = make_tensor3(game.states, A1, A2);
  for (int s = 0; s < game.states; ++s)
    for (int a1 = 0; a1 < A1; ++a1)
      for (int a2 = 0; a2 < A2; ++a2) {
        double cont = 0.0;
        for (int t = 0; t < game.states; ++t)
          cont += game.transitions[s][a1][a2][t] * v[t];
        q[s][a1][a2] = game.payoffs[player][s][a1][a2] + game.gamma * cont;
      }
  return q;
}

void check_mdp_view(const MdpView& mdp, const char* who) {
  if (mdp.states < 1 || mdp.actions < 1)
    throw std::invalid_argument(std::string(who) + ": empty view");
  if (!(mdp.gamma >= 0.0 && mdp.gamma < 1.0))
    throw std::invalid_argument(std::string(who) + ": gamma must lie in [0,1)");
  if (static_cast<int>(mdp.reward.size()) != mdp.states ||
      static_cast<int>(mdp.next.size()) != mdp.states)
    throw std::invalid_argument(std::string(who) + ": state shape mismatch");
  for (int s = 0; s < mdp.states; ++s) {
    if (static_cast<int>(mdp.reward[s].size()) != mdp.actions ||
        static_cast<int>(mdp.next[s].size()) != mdp.actions)
      throw std::invalid_argument(std::string(who) + ": action shape mismatch");
    for (int a = 0; a < mdp.actions; ++a)
      if (static_cast<int>(mdp.next[s][a].size()) != mdp.states)
        throw std::invalid_argument(std::string(who) + ": successor shape mismatch");
  }
}

Mat apply_mdp_operator(const MdpView& mdp, const Mat& q) {
  Vec v(mdp.states);
  for (int s = 0; s < mdp.states; ++s)
    v[s] = *std::max_element(q[s].begin(), q[s].end());
  Mat out = make_mat(mdp.states, mdp.actions);
  for (int s = 0; s < mdp.states; ++s)
    for (int a = 0; a < mdp.actions; ++a) {
      double cont = 0.0;
      for (int t = 0; t < mdp.states; ++t) cont += mdp.next[s][a][t] * v[t];
      out[s][a] = mdp.reward[s][a] + mdp.gamma * cont;
    }
  return out;
}

double sup_diff(const Mat& a, const Mat& b) {
  double m = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s)
    m = std::max(m, max_abs_diff(a[s], b[s]));
  return m;
}

}  // namespace

EquilibriumSolution shapley_iterate(const StochasticGame& game,
                                    const ShapleyOptions& options) {
  check_valid(game, "shapley_iterate");
  if (!is_zero_sum(game))
    throw std::invalid_argument("shapley_iterate: zero-sum games only");
  if (!(options.tolerance > 0.0))
    throw std::invalid_argument("shapley_iterate: tolerance must be positive");

  EquilibriumSolution sol;
  for (int player = 0; player < 2; ++player) {
    Vec v(game.states, 0.0);
    if (options.record_iterates) sol.iterates[player].push_back(v);
    if (game.gamma == 0.0) {
      v = apply_value_operator(game, player, v);
      if (options.record_iterates) sol.iterates[player].push_back(v);
    } else {
      const double threshold = stop_threshold(game.gamma, options.tolerance);
      for (;;) {
        Vec next = apply_value_operator(game, player, v);
        const double diff = max_abs_diff(next, v);
        v = std::move(next);
        if (options.record_iterates) sol.iterates[player].push_back(v);
        if (diff <= threshold) break;
      }
    }
    sol.values[player] = v;
    sol.q_functions[player] = lift_q(game, player, v);

    const Vec check = apply_value_operator(game, player, v);
    sol.residual = std::max(sol.residual, max_abs_diff(check, v));

    sol.strategies[player].rows.resize(game.states);
    for (int s = 0; s < game.states; ++s)
      sol.strategies[player].rows[s] =
          stage_strategy(sol.q_functions[player][s], player);
  }
  return sol;
}

EquilibriumSolution shapley_iterate(const StochasticGame& game, double tolerance) {
  ShapleyOptions options;
  options.tolerance = tolerance;
  return shapley_iterate(game, options);
}

Tensor3 apply_q_operator(const StochasticGame& game, const Tensor3& q, int player) {
  check_player(player);
  check_valid(game, "apply_q_operator");
  const int A1 = game.action_counts[0];
  const int A2 = game.action_counts[1];
  if (static_cast<int>(q.size()) != game.states)
    throw std::invalid_argument("apply_q_operator: state shape mismatch");
  for (const Mat& m : q)
    if (static_cast<int>(m.size()) != A1 ||
        static_cast<int>(m[0].size()) != A2)
      throw std::invalid_argument("apply_q_operator: action shape mismatch");

  Vec w(game.states);
  for (int t = 0; t < game.states; ++t) w[t] = stage_value(q[t], player);

  Tensor3 out = make_tensor3(game.states, A1, A2);
  for (int s = 0; s < game.states; ++s)
    for (int a1 = 0; a1 < A1; ++a1)
      for (int a2 = 0; a2 < A2; ++a2) {
        double cont = 0.0;
        for (int t = 0; t < game.states; ++t)
          cont += game.transitions[s][a1][a2][t] * w[t];
        out[s][a1][a2] = game.payoffs[player][s][a1][a2] + game.gamma * cont;
      }
  return out;
}

MdpView mdp_view_for_controller(const StochasticGame& game, int player) {
  check_player(player);
  check_valid(game, "mdp_view_for_controller");
  const int other = 1 - player;
  if (game.action_counts[other] != 1)
    throw std::invalid_argument(
        "mdp_view_for_controller: the other player must have exactly one action");
  MdpView mdp;
  mdp.states = game.states;
  mdp.actions = game.action_counts[player];
  mdp.gamma = game.gamma;
  mdp.reward = make_mat(mdp.states, mdp.actions);
  mdp.next = make_tensor3(mdp.states, mdp.actions, mdp.states);
  for (int s = 0; s < mdp.states; ++s)
    for (int a = 0; a < mdp.actions; ++a) {
      const int a1 = player == 0 ? a : 0;
      const int a2 = player == 0 ? 0 : a;
      mdp.reward[s][a] = game.payoffs[player][s][a1][a2];
      mdp.next[s][a] = game.transitions[s][a1][a2];
    }
  return mdp;
}

MdpView mdp_view_vs_frozen(const StochasticGame& game,
                           const StationaryStrategy& opponent, int player) {
  check_player(player);
  check_valid(game, "mdp_view_vs_frozen");
  const int other = 1 - player;
  if (static_cast<int>(opponent.rows.size()) != game.states ||
      !opponent.valid() ||
      static_cast<int>(opponent.rows[0].size()) != game.action_counts[other])
    throw std::invalid_argument("mdp_view_vs_frozen: opponent strategy mismatch");

  MdpView mdp;
  mdp.states = game.states;
  mdp.actions = game.action_counts[player];
  mdp.gamma = game.gamma;
  mdp.reward = make_mat(mdp.states, mdp.actions);
  mdp.next = make_tensor3(mdp.states, mdp.actions, mdp.states);
  for (int s = 0; s < mdp.states; ++s)
    for (int a = 0; a < mdp.actions; ++a)
      for (int o = 0; o < game.action_counts[other]; ++o) {
        const double w = opponent.rows[s][o];
        if (w == 0.0) continue;
        const int a1 = player == 0 ? a : o;
        const int a2 = player == 0 ? o : a;
        mdp.reward[s][a] += w * game.payoffs[player][s][a1][a2];
        for (int t = 0; t < game.states; ++t)
          mdp.next[s][a][t] += w * game.transitions[s][a1][a2][t];
      }
  return mdp;
}

MdpSolution solve_mdp(const MdpView& mdp, double tolerance) {
  check_mdp_view(mdp, "solve_mdp");
  if (!(tolerance > 0.0))
    throw std::invalid_argument("solve_mdp: tolerance must be positive");

  Mat q = make_mat(mdp.states, mdp.actions);
  if (mdp.gamma == 0.0) {
    q = apply_mdp_operator(mdp, q);
  } else {
    const double threshold = stop_threshold(mdp.gamma, tolerance);
    for (;;) {
      Mat next = apply_mdp_operator(mdp, q);
      const double diff = sup_diff(next, q);
      q = std::move(next);
      if (diff <= threshold) break;
    }
  }

  MdpSolution sol;
  sol.residual = sup_diff(apply_mdp_operator(mdp, q), q);
  sol.v_star.resize(mdp.states);
  for (int s = 0; s < mdp.states; ++s)
    sol.v_star[s] = *std::max_element(q[s].begin(), q[s].end());
  sol.q_star = std::move(q);
  return sol;
}

MdpSolution solve_mdp(const StochasticGame& game, int player, double tolerance) {
  return solve_mdp(mdp_view_for_controller(game, player), tolerance);
}

FrozenBestResponse best_response_to_frozen(const StochasticGame& game,
                                           const StationaryStrategy& opponent,
                                           int player, double tolerance) {
  FrozenBestResponse out;
  out.solution = solve_mdp(mdp_view_vs_frozen(game, opponent, player), tolerance);
  out.q_joint = lift_q(game, player, out.solution.v_star);
  return out;
}

}  // namespace sgdyn
