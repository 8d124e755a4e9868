#pragma once

#include <array>
#include <optional>

#include "sgdyn/agents.hpp"
#include "sgdyn/game.hpp"
#include "sgdyn/planning.hpp"
#include "sgdyn/types.hpp"

namespace sgdyn {

// Admissible weighting interval for the drift-penalized Lyapunov value and
// the bound constants: (1, 1/gamma), unbounded above when gamma = 0.
double default_lambda(double gamma);
void validate_lambda(double lambda, double gamma);  // throws ConfigError

// Exploitability of a product profile on a zero-sum stage game; rejects
// stages whose payoffs do not cancel.
double lyapunov_V(const StrategicFormGame& stage, const Vec& row_strategy,
                  const Vec& col_strategy);

// One-state drift-penalized value over a pair of (not necessarily
// cancelling) q matrices, both indexed [a1][a2] in game order:
//   (sum_i max_{own} E_{opp ~ pi_opp} q_i - lambda * max_a |q1 + q2|)_+
double lyapunov_Vstar(const Mat& q1, const Mat& q2, const Vec& pi1, const Vec& pi2,
                      double lambda, double gamma);

// max_a |q1(a) + q2(a)| at one state.
double zero_sum_drift(const Mat& q1, const Mat& q2);

// Exact value of the stationary product profile for `player`:
// solves (I - gamma * P_pi) v = r_pi directly.
Vec evaluate_profile(const StochasticGame& game, const StationaryStrategy& pi1,
                     const StationaryStrategy& pi2, int player);

struct NashGap {
  Mat per_player;       // [player][state], clamped at zero
  double max_gap = 0.0; // max over players and states
};

// Per-state unilateral improvement of each player over the profile, via a
// best-response oracle against the frozen opponent and exact evaluation.
NashGap stochastic_nash_gap(const StochasticGame& game, const StationaryStrategy& pi1,
                            const StationaryStrategy& pi2,
                            double tolerance = kPlanningTol);

// Scale constants of the perturbation guarantees. The strategy-weighting
// variants substitute gamma itself for lambda; both readings are reported
// and neither is asserted as ground truth.
struct TheoremBounds {
  double D = 0.0;  // (1/(1-gamma)) * sum_i max |r_i|
  std::optional<double> model_free_v;  // absent when gamma = 0
  double model_free_q = 0.0;
  double g_lambda = 0.0;
  double g_gamma = 0.0;
  double minimal_v = 0.0;
  double minimal_v_gamma_sub = 0.0;
  double minimal_strategy = 0.0;
  double minimal_strategy_gamma_sub = 0.0;
};

TheoremBounds theorem_bounds(const StochasticGame& game, double epsilon, double tau,
                             double lambda);

// Metric values captured after k completed steps. Vectors are indexed by
// state; a metric a dynamics pair cannot support is left empty (absent),
// never reported as zero.
struct DiagnosticSnapshot {
  long long k = 0;
  Vec V;      // exploitability of the profile on the equilibrium stage games
  Vec Vstar;  // drift-penalized value of the believed q pair
  Vec drift;  // max_a |q1 + q2| of the believed q pair
  std::array<Vec, 2> q_err;  // sup_a |q_hat_i - q_star_i| per state
  std::array<Vec, 2> v_err;  // |v_hat_i - v_star_i| per state
  Mat nash_gap;              // [player][state]
  double nash_gap_max = 0.0;
  TheoremBounds bounds;
};

struct DiagnosticOptions {
  double lambda = 2.0;
  double tolerance = kPlanningTol;
  double epsilon = 0.0;  // exploration rate entering the bound constants
  double tau = 0.0;      // temperature entering the bound constants
};

// Assembles a snapshot from the two agents' current beliefs. The profile is
// each player's empirically observed strategy (the opponent's belief about
// them) when available, else the player's own strategy estimate. Verifies
// the drift lower bound on the summed value estimates when both sides carry
// joint q beliefs; a violation throws std::logic_error.
DiagnosticSnapshot evaluate_snapshot(const StochasticGame& game,
                                     const EquilibriumSolution& oracle, const Agent& agent0,
                                     const Agent& agent1, long long k,
                                     const DiagnosticOptions& options);

}  // namespace sgdyn
