#pragma once

#include <array>
#include <vector>

#include "sgdyn/game.hpp"
#include "sgdyn/types.hpp"

namespace sgdyn {

// Default accuracy of the ground-truth solvers.
inline constexpr double kPlanningTol = 1e-10;

// Saddle-point solution of a zero-sum stochastic game. Player indices are 0
// (row, maximizes payoffs[0]) and 1 (column, maximizes payoffs[1]).
struct EquilibriumSolution {
  std::array<Vec, 2> values;            // values[i][s] = v*_i(s)
  std::array<Tensor3, 2> q_functions;   // q_functions[i][s][a1][a2]
  std::array<StationaryStrategy, 2> strategies;
  // Sup-norm Bellman residual of the returned values, maxed over players.
  double residual = 0.0;
  // Value-iteration trajectories (v_0 = 0 first), kept when requested.
  std::array<std::vector<Vec>, 2> iterates;
};

struct ShapleyOptions {
  double tolerance = kPlanningTol;
  bool record_iterates = false;
};

// Value iteration v <- T v from v = 0, stopped by the contraction
// a-posteriori bound so that both |v - v*| and the Bellman residual end up
// within tolerance. One sweep suffices when gamma = 0.
EquilibriumSolution shapley_iterate(const StochasticGame& game,
                                    const ShapleyOptions& options);
EquilibriumSolution shapley_iterate(const StochasticGame& game,
                                    double tolerance = kPlanningTol);

// One application of the Q-form operator for `player`:
// out(s,a) = r_i(s,a) + gamma * sum_s' p(s'|s,a) * val_i(q(s',.)).
Tensor3 apply_q_operator(const StochasticGame& game, const Tensor3& q, int player);

struct MdpSolution {
  Mat q_star;  // q_star[s][a], a over the controller's actions
  Vec v_star;  // v_star[s] = max_a q_star[s][a]
  double residual = 0.0;
};

// Single-controller view of a game: rewards and transitions indexed by one
// player's actions only.
struct MdpView {
  int states = 0;
  int actions = 0;
  Mat reward;    // [s][a]
  Tensor3 next;  // [s][a][s']
  double gamma = 0.0;
};

// Requires the other player to have exactly one action.
MdpView mdp_view_for_controller(const StochasticGame& game, int player);

// Averages rewards and transitions over a fixed opponent strategy.
MdpView mdp_view_vs_frozen(const StochasticGame& game,
                           const StationaryStrategy& opponent, int player);

MdpSolution solve_mdp(const MdpView& mdp, double tolerance = kPlanningTol);
MdpSolution solve_mdp(const StochasticGame& game, int player,
                      double tolerance = kPlanningTol);

struct FrozenBestResponse {
  MdpSolution solution;  // over the responder's own actions
  // Joint-action lift: q_joint[s][a1][a2] = r_i(s,a) + gamma * E[v_star(s')].
  Tensor3 q_joint;
};

FrozenBestResponse best_response_to_frozen(const StochasticGame& game,
                                           const StationaryStrategy& opponent,
                                           int player,
                                           double tolerance = kPlanningTol);

}  // namespace sgdyn
