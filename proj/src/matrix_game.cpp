#include "sgdyn/matrix_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sgdyn {
namespace {

constexpr double kPivotEps = 1e-11;

void check_matrix(const Mat& m, const char* who) {
  if (m.empty() || m[0].empty())
    throw std::invalid_argument(std::string(who) + ": empty matrix");
  const std::size_t cols = m[0].size();
  for (const Vec& row : m) {
    if (row.size() != cols)
      throw std::invalid_argument(std::string(who) + ": ragged matrix");
    for (double x : row)
      if (!std::isfinite(x))
        throw std::invalid_argument(std::string(who) + ": non-finite entry");
  }
}

struct LpResult {
  double objective = 0.0;
  Vec primal;  // y, one per column of the game matrix
  Vec dual;    // u, one per row
};

// max sum(y) s.t. A y <= 1, y >= 0 where A has strictly positive entries, so
// the slack basis is feasible and the optimum is finite. Entering and leaving
// variables follow Bland's rule; ties in the ratio test pick the smallest
// basis index. The pivot path is therefore a pure function of A.
LpResult simplex_all_positive(const Mat& a) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(a[0].size());
  const int rhs = n + m;
  Mat t(m + 1, Vec(n + m + 1, 0.0));
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1.0;
    t[i][rhs] = 1.0;
    basis[i] = n + i;
  }
  for (int j = 0; j < n; ++j) t[m][j] = -1.0;

  for (;;) {
    int enter = -1;
    for (int j = 0; j < n + m; ++j) {
      if (t[m][j] < -kPivotEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (t[i][enter] <= kPivotEps) continue;
      const double ratio = t[i][rhs] / t[i][enter];
      const double slack = 1e-12 * (1.0 + std::abs(best_ratio));
      if (ratio < best_ratio - slack ||
          (ratio <= best_ratio + slack && (leave < 0 || basis[i] < basis[leave]))) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave < 0)
      throw std::logic_error("solve_matrix_game: LP unbounded on positive matrix");

    const double piv = t[leave][enter];
    for (double& x : t[leave]) x /= piv;
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = t[i][enter];
      if (f == 0.0) continue;
      for (int j = 0; j <= rhs; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }

  LpResult r;
  r.objective = t[m][rhs];
  r.primal.assign(n, 0.0);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) r.primal[basis[i]] = t[i][rhs];
  r.dual.assign(m, 0.0);
  for (int i = 0; i < m; ++i) r.dual[i] = t[m][n + i];
  return r;
}

Vec normalized_strategy(Vec v) {
  double sum = 0.0;
  for (double& x : v) {
    if (x < 0.0) x = 0.0;
    sum += x;
  }
  if (sum <= 0.0)
    throw std::logic_error("solve_matrix_game: degenerate strategy mass");
  for (double& x : v) x /= sum;
  return v;
}

}  // namespace

MatrixGameSolution solve_matrix_game(const Mat& payoff, double tolerance) {
  check_matrix(payoff, "solve_matrix_game");
  const int m = static_cast<int>(payoff.size());
  const int n = static_cast<int>(payoff[0].size());

  double lo = std::numeric_limits<double>::infinity();
  for (const Vec& row : payoff)
    for (double x : row) lo = std::min(lo, x);
  // Shift so every entry is >= 1; the shifted game value is then positive and
  // the bounded-form LP below is feasible with the slack basis.
  const double shift = 1.0 - lo;
  Mat shifted(m, Vec(n));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) shifted[i][j] = payoff[i][j] + shift;

  const LpResult lp = simplex_all_positive(shifted);
  if (!(lp.objective > 0.0))
    throw std::logic_error("solve_matrix_game: nonpositive LP objective");

  MatrixGameSolution sol;
  sol.value = 1.0 / lp.objective - shift;
  sol.col_strategy = normalized_strategy(lp.primal);
  sol.row_strategy = normalized_strategy(lp.dual);

  double row_guarantee = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    double v = 0.0;
    for (int i = 0; i < m; ++i) v += sol.row_strategy[i] * payoff[i][j];
    row_guarantee = std::min(row_guarantee, v);
  }
  double col_concession = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    double v = 0.0;
    for (int j = 0; j < n; ++j) v += payoff[i][j] * sol.col_strategy[j];
    col_concession = std::max(col_concession, v);
  }
  sol.residual =
      std::max({0.0, sol.value - row_guarantee, col_concession - sol.value});
  if (sol.residual > tolerance)
    throw std::runtime_error("solve_matrix_game: residual " +
                             std::to_string(sol.residual) +
                             " exceeds tolerance");
  return sol;
}

BestResponse best_response(const Mat& payoff, const Vec& opponent, Side side) {
  check_matrix(payoff, "best_response");
  if (!is_distribution(opponent))
    throw std::invalid_argument("best_response: opponent is not a distribution");
  const int rows = static_cast<int>(payoff.size());
  const int cols = static_cast<int>(payoff[0].size());
  const int own = side == Side::row ? rows : cols;
  const int opp = side == Side::row ? cols : rows;
  if (static_cast<int>(opponent.size()) != opp)
    throw std::invalid_argument("best_response: opponent size mismatch");

  Vec vals(own, 0.0);
  for (int k = 0; k < own; ++k)
    for (int j = 0; j < opp; ++j)
      vals[k] += opponent[j] * (side == Side::row ? payoff[k][j] : payoff[j][k]);

  BestResponse br;
  br.value = *std::max_element(vals.begin(), vals.end());
  for (int k = 0; k < own; ++k)
    if (vals[k] >= br.value - kTieTol) br.argmax_set.push_back(k);
  br.chosen = br.argmax_set.front();
  return br;
}

double exploitability(const StrategicFormGame& game, const Vec& row_strategy,
                      const Vec& col_strategy) {
  if (!game.zero_sum)
    throw std::invalid_argument("exploitability: zero-sum games only");
  if (static_cast<int>(row_strategy.size()) != game.action_counts[0] ||
      static_cast<int>(col_strategy.size()) != game.action_counts[1])
    throw std::invalid_argument("exploitability: profile size mismatch");
  if (!is_distribution(row_strategy) || !is_distribution(col_strategy))
    throw std::invalid_argument("exploitability: profile not on the simplex");

  double total = 0.0;
  for (int i = 0; i < 2; ++i) {
    const BestResponse br =
        i == 0 ? best_response(game.payoffs[0], col_strategy, Side::row)
               : best_response(game.payoffs[1], row_strategy, Side::col);
    double realized = 0.0;
    for (int a1 = 0; a1 < game.action_counts[0]; ++a1)
      for (int a2 = 0; a2 < game.action_counts[1]; ++a2)
        realized += row_strategy[a1] * col_strategy[a2] * game.payoffs[i][a1][a2];
    total += br.value - realized;
  }
  return std::max(total, 0.0);
}

}  // namespace sgdyn
