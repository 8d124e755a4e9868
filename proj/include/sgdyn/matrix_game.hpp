#pragma once

#include <vector>

#include "sgdyn/game.hpp"
#include "sgdyn/types.hpp"

namespace sgdyn {

// Default bound on the duality gap of a returned equilibrium pair.
inline constexpr double kMatrixSolveTol = 1e-9;

struct MatrixGameSolution {
  double value = 0.0;
  Vec row_strategy;
  Vec col_strategy;
  // Max one-sided duality gap of the returned pair on the input matrix.
  double residual = 0.0;
};

// Minimax value and optimal mixed strategies of the zero-sum matrix game
// where the row player receives payoff[i][j] and the column player its
// negation. Deterministic: identical inputs give identical outputs.
MatrixGameSolution solve_matrix_game(const Mat& payoff, double tolerance = kMatrixSolveTol);

enum class Side { row, col };

struct BestResponse {
  double value = 0.0;
  // All actions whose expected payoff is within kTieTol of the maximum,
  // ascending; chosen is the smallest.
  std::vector<int> argmax_set;
  int chosen = 0;
};

// Best pure response of the responder against a mixed opponent.
// `payoff` is the responder's own payoff: Side::row reads payoff[own][opp],
// Side::col reads payoff[opp][own].
BestResponse best_response(const Mat& payoff, const Vec& opponent, Side side);

// Sum over players of (best-response value minus realized value) under the
// product profile (row_strategy, col_strategy). Zero-sum games only.
double exploitability(const StrategicFormGame& game, const Vec& row_strategy,
                      const Vec& col_strategy);

}  // namespace sgdyn
