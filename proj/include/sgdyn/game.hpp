#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgdyn/types.hpp"

namespace sgdyn {

// One-shot two-player game. payoffs[i][a1][a2] is player i's payoff under the
// joint action (a1, a2).
struct StrategicFormGame {
  std::array<int, 2> action_counts{0, 0};
  std::array<Mat, 2> payoffs;
  bool zero_sum = false;

  // r2 := -r1 entrywise; zero_sum set.
  static StrategicFormGame zero_sum_from(const Mat& r1);
  static StrategicFormGame from_payoffs(const Mat& r1, const Mat& r2);
};

// Discounted two-player stochastic game.
// payoffs[i][s][a1][a2]; transitions[s][a1][a2][s'] rows on the simplex;
// gamma in [0,1); initial is the start-state distribution.
struct StochasticGame {
  int states = 0;
  std::array<int, 2> action_counts{0, 0};
  std::array<Tensor3, 2> payoffs;
  Tensor4 transitions;
  double gamma = 0.0;
  Vec initial;
  nlohmann::json meta = nlohmann::json::object();

  StrategicFormGame stage_game(int s) const;
};

// Per-state mixed strategy for one player: rows[s] is a distribution over
// that player's actions.
struct StationaryStrategy {
  Mat rows;

  static StationaryStrategy uniform(int states, int actions);
  bool valid(double tol = kSimplexTol) const;
};

enum class IssueKind { structure, invariant };

struct ValidationIssue {
  IssueKind kind = IssueKind::invariant;
  std::string message;
  int state = -1;
  int a1 = -1;
  int a2 = -1;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool valid() const { return issues.empty(); }
  bool structurally_sound() const;
  std::string to_string() const;
};

ValidationReport validate_game(const StochasticGame& game);
ValidationReport validate_game(const StrategicFormGame& game);

bool is_zero_sum(const StochasticGame& game, double tol = kZeroSumTol);

enum class ReachabilityLabel { case_i, case_ii, case_iii, case_iv, not_recurrent };

std::string to_string(ReachabilityLabel label);

// Truth set of the four recurrence conditions plus the strongest label.
// case_i:  every transition probability is positive.
// case_ii: every ordered state pair is linked by some joint action.
// case_iii: the graph with an edge where min-over-actions probability is
//           positive is strongly connected (paths of length >= 1).
// case_iv: same with max-over-actions edges.
struct ReachabilityClass {
  bool case_i = false;
  bool case_ii = false;
  bool case_iii = false;
  bool case_iv = false;
  ReachabilityLabel label = ReachabilityLabel::not_recurrent;
};

ReachabilityClass classify_reachability(const StochasticGame& game);

enum class ReachabilityTarget { case_i, case_ii };

struct GeneratorSpec {
  int states = 3;
  std::array<int, 2> action_counts{2, 2};
  double gamma = 0.5;
  double payoff_lo = -1.0;
  double payoff_hi = 1.0;
  ReachabilityTarget target = ReachabilityTarget::case_i;
};

// Probability floor applied to every transition entry (before row
// normalization) when generating games whose target is case_i.
inline constexpr double kGeneratorFloor = 0.01;

// Deterministic in (spec, seed). Payoffs are exactly zero-sum.
StochasticGame generate_game(const GeneratorSpec& spec, std::uint64_t seed);

// Single state, discount gamma, stage payoffs r1 and -r1.
StochasticGame embed_matrix_game(const Mat& r1, double gamma);

Mat matching_pennies_payoffs();
Mat rock_paper_scissors_payoffs();

}  // namespace sgdyn
