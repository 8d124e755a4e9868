#include "sgdyn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sgdyn/matrix_game.hpp"
#include "sgdyn/schedules.hpp"

namespace sgdyn {
namespace {

// Solves A x = b by Gaussian elimination with partial pivoting. A is small
// and, for discounted evaluation, strictly diagonally dominant.
Vec solve_linear(Mat a, Vec b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row)
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    if (std::abs(a[col][col]) < 1e-14)
      throw std::runtime_error("policy evaluation: singular system");
    for (int row = col + 1; row < n; ++row) {
      const double f = a[row][col] / a[col][col];
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) a[row][j] -= f * a[col][j];
      b[row] -= f * b[col];
    }
  }
  Vec x(n, 0.0);
  for (int row = n - 1; row >= 0; --row) {
    double acc = b[row];
    for (int j = row + 1; j < n; ++j) acc -= a[row][j] * x[j];
    x[row] = acc / a[row][row];
  }
  return x;
}

// max_{own} E_{opp ~ pi_opp} q for one player's q matrix in game order.
double best_expected_payoff(const Mat& q, const Vec& pi_opp, int player) {
  double best = -std::numeric_limits<double>::infinity();
  if (player == 0) {
    for (std::size_t a1 = 0; a1 < q.size(); ++a1) {
      double e = 0.0;
      for (std::size_t a2 = 0; a2 < q[a1].size(); ++a2) e += pi_opp[a2] * q[a1][a2];
      best = std::max(best, e);
    }
  } else {
    for (std::size_t a2 = 0; a2 < q[0].size(); ++a2) {
      double e = 0.0;
      for (std::size_t a1 = 0; a1 < q.size(); ++a1) e += pi_opp[a1] * q[a1][a2];
      best = std::max(best, e);
    }
  }
  return best;
}

// The player's strategy as seen by the opponent's empirical belief when one
// exists, else the player's own estimate.
Mat profile_rows(const Agent& self, const Agent& other) {
  if (const Mat* seen = other.believed_opponent_strategy()) return *seen;
  return self.own_strategy_estimate().rows;
}

}  // namespace

double default_lambda(double gamma) {
  if (gamma == 0.0) return 2.0;
  return 0.5 * (1.0 + 1.0 / gamma);
}

void validate_lambda(double lambda, double gamma) {
  if (!(lambda > 1.0))
    throw ConfigError("lambda must exceed 1 (got " + std::to_string(lambda) + ")");
  if (gamma > 0.0 && !(lambda < 1.0 / gamma))
    throw ConfigError("lambda must stay below 1/gamma = " + std::to_string(1.0 / gamma) +
                      " (got " + std::to_string(lambda) + ")");
}

double lyapunov_V(const StrategicFormGame& stage, const Vec& row_strategy,
                  const Vec& col_strategy) {
  for (std::size_t i = 0; i < stage.payoffs[0].size(); ++i)
    for (std::size_t j = 0; j < stage.payoffs[0][i].size(); ++j)
      if (std::abs(stage.payoffs[0][i][j] + stage.payoffs[1][i][j]) > kZeroSumTol)
        throw std::invalid_argument("lyapunov_V: stage payoffs do not cancel");
  return exploitability(stage, row_strategy, col_strategy);
}

double lyapunov_Vstar(const Mat& q1, const Mat& q2, const Vec& pi1, const Vec& pi2,
                      double lambda, double gamma) {
  validate_lambda(lambda, gamma);
  const double gain = best_expected_payoff(q1, pi2, 0) + best_expected_payoff(q2, pi1, 1);
  const double penalized = gain - lambda * zero_sum_drift(q1, q2);
  return std::max(0.0, penalized);
}

double zero_sum_drift(const Mat& q1, const Mat& q2) {
  if (q1.size() != q2.size()) throw std::invalid_argument("zero_sum_drift: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < q1.size(); ++i) {
    if (q1[i].size() != q2[i].size())
      throw std::invalid_argument("zero_sum_drift: shape mismatch");
    for (std::size_t j = 0; j < q1[i].size(); ++j)
      m = std::max(m, std::abs(q1[i][j] + q2[i][j]));
  }
  return m;
}

Vec evaluate_profile(const StochasticGame& game, const StationaryStrategy& pi1,
                     const StationaryStrategy& pi2, int player) {
  const int n = game.states;
  Mat system(n, Vec(n, 0.0));
  Vec reward(n, 0.0);
  for (int s = 0; s < n; ++s) {
    system[s][s] = 1.0;
    for (int a1 = 0; a1 < game.action_counts[0]; ++a1)
      for (int a2 = 0; a2 < game.action_counts[1]; ++a2) {
        const double w = pi1.rows[s][a1] * pi2.rows[s][a2];
        if (w == 0.0) continue;
        reward[s] += w * game.payoffs[player][s][a1][a2];
        for (int s2 = 0; s2 < n; ++s2)
          system[s][s2] -= game.gamma * w * game.transitions[s][a1][a2][s2];
      }
  }
  return solve_linear(std::move(system), std::move(reward));
}

NashGap stochastic_nash_gap(const StochasticGame& game, const StationaryStrategy& pi1,
                            const StationaryStrategy& pi2, double tolerance) {
  NashGap out;
  out.per_player = make_mat(2, game.states, 0.0);
  for (int player = 0; player < 2; ++player) {
    const StationaryStrategy& opponent = player == 0 ? pi2 : pi1;
    const FrozenBestResponse br = best_response_to_frozen(game, opponent, player, tolerance);
    const Vec realized = evaluate_profile(game, pi1, pi2, player);
    for (int s = 0; s < game.states; ++s) {
      const double gap = std::max(0.0, br.solution.v_star[s] - realized[s]);
      out.per_player[player][s] = gap;
      out.max_gap = std::max(out.max_gap, gap);
    }
  }
  return out;
}

TheoremBounds theorem_bounds(const StochasticGame& game, double epsilon, double tau,
                             double lambda) {
  validate_lambda(lambda, game.gamma);
  const double gamma = game.gamma;

  TheoremBounds out;
  double reward_span = 0.0;
  for (int i = 0; i < 2; ++i) {
    double m = 0.0;
    for (const Mat& per_state : game.payoffs[i])
      for (const Vec& row : per_state) m = std::max(m, max_abs(row));
    reward_span += m;
  }
  out.D = reward_span / (1.0 - gamma);

  const double one_minus_sq = (1.0 - gamma) * (1.0 - gamma);
  out.model_free_q = epsilon * out.D * (1.0 + gamma) / one_minus_sq;
  if (gamma > 0.0) out.model_free_v = epsilon * out.D * (1.0 + gamma) / (gamma * one_minus_sq);

  const auto g_of = [gamma](double weight) {
    return (2.0 + weight - weight * gamma) / ((1.0 - weight * gamma) * (1.0 - gamma));
  };
  out.g_lambda = g_of(lambda);
  out.g_gamma = g_of(gamma);

  const double log_actions =
      std::log(static_cast<double>(game.action_counts[0]) * game.action_counts[1]);
  out.minimal_v = tau * log_actions * out.g_lambda;
  out.minimal_v_gamma_sub = tau * log_actions * out.g_gamma;
  out.minimal_strategy = tau * log_actions * (out.g_lambda * (1.0 + gamma) - 1.0);
  out.minimal_strategy_gamma_sub = tau * log_actions * (out.g_gamma * (1.0 + gamma) - 1.0);
  return out;
}

DiagnosticSnapshot evaluate_snapshot(const StochasticGame& game,
                                     const EquilibriumSolution& oracle, const Agent& agent0,
                                     const Agent& agent1, long long k,
                                     const DiagnosticOptions& options) {
  validate_lambda(options.lambda, game.gamma);
  DiagnosticSnapshot snap;
  snap.k = k;

  const StationaryStrategy pi1{profile_rows(agent0, agent1)};
  const StationaryStrategy pi2{profile_rows(agent1, agent0)};

  snap.V.resize(game.states);
  for (int s = 0; s < game.states; ++s) {
    const StrategicFormGame stage =
        StrategicFormGame::zero_sum_from(oracle.q_functions[0][s]);
    snap.V[s] = lyapunov_V(stage, pi1.rows[s], pi2.rows[s]);
  }

  const Tensor3* q_beliefs[2] = {agent0.joint_q(), agent1.joint_q()};
  if (q_beliefs[0] != nullptr && q_beliefs[1] != nullptr) {
    snap.Vstar.resize(game.states);
    snap.drift.resize(game.states);
    for (int s = 0; s < game.states; ++s) {
      const Mat& q1 = (*q_beliefs[0])[s];
      const Mat& q2 = (*q_beliefs[1])[s];
      snap.Vstar[s] = lyapunov_Vstar(q1, q2, pi1.rows[s], pi2.rows[s], options.lambda,
                                     game.gamma);
      snap.drift[s] = zero_sum_drift(q1, q2);
    }
  }

  const Agent* agents[2] = {&agent0, &agent1};
  for (int i = 0; i < 2; ++i) {
    if (q_beliefs[i] != nullptr) {
      snap.q_err[i].resize(game.states);
      for (int s = 0; s < game.states; ++s) {
        double m = 0.0;
        for (std::size_t a1 = 0; a1 < (*q_beliefs[i])[s].size(); ++a1)
          m = std::max(m, max_abs_diff((*q_beliefs[i])[s][a1],
                                       oracle.q_functions[i][s][a1]));
        snap.q_err[i][s] = m;
      }
    }
    if (const auto v = agents[i]->value_estimate()) {
      snap.v_err[i].resize(game.states);
      for (int s = 0; s < game.states; ++s)
        snap.v_err[i][s] = std::abs((*v)[s] - oracle.values[i][s]);
    }
  }

  // Summed value estimates can never undercut the drift floor; a violation
  // means a belief update leaked information between the two sides.
  if (!snap.drift.empty()) {
    const auto v0 = agent0.value_estimate();
    const auto v1 = agent1.value_estimate();
    if (v0 && v1)
      for (int s = 0; s < game.states; ++s)
        if ((*v0)[s] + (*v1)[s] < -options.lambda * snap.drift[s] - 1e-9)
          throw std::logic_error("diagnostics: summed value estimates undercut the drift floor");
  }

  const NashGap gap = stochastic_nash_gap(game, pi1, pi2, options.tolerance);
  snap.nash_gap = gap.per_player;
  snap.nash_gap_max = gap.max_gap;

  snap.bounds = theorem_bounds(game, options.epsilon, options.tau, options.lambda);
  return snap;
}

}  // namespace sgdyn
