#include "sgdyn/game.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "sgdyn/rng.hpp"

namespace sgdyn {
namespace {

bool rectangular(const Mat& m, int rows, int cols) {
  if (static_cast<int>(m.size()) != rows) return false;
  for (const Vec& r : m)
    if (static_cast<int>(r.size()) != cols) return false;
  return true;
}

void push(ValidationReport& rep, IssueKind kind, std::string msg, int s = -1,
          int a1 = -1, int a2 = -1) {
  rep.issues.push_back(ValidationIssue{kind, std::move(msg), s, a1, a2});
}

// Boolean transitive closure; r[i][j] afterwards means "j reachable from i by
// a path of length >= 1".
void close_paths(std::vector<std::vector<bool>>& r) {
  const int n = static_cast<int>(r.size());
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (r[i][k])
        for (int j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = true;
}

bool all_true(const std::vector<std::vector<bool>>& r) {
  for (const auto& row : r)
    for (bool x : row)
      if (!x) return false;
  return true;
}

}  // namespace

StrategicFormGame StrategicFormGame::zero_sum_from(const Mat& r1) {
  Mat r2(r1.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    r2[i].resize(r1[i].size());
    for (std::size_t j = 0; j < r1[i].size(); ++j) r2[i][j] = -r1[i][j];
  }
  StrategicFormGame g;
  g.action_counts = {static_cast<int>(r1.size()),
                     r1.empty() ? 0 : static_cast<int>(r1[0].size())};
  g.payoffs = {r1, std::move(r2)};
  g.zero_sum = true;
  return g;
}

StrategicFormGame StrategicFormGame::from_payoffs(const Mat& r1, const Mat& r2) {
  StrategicFormGame g;
  g.action_counts = {static_cast<int>(r1.size()),
                     r1.empty() ? 0 : static_cast<int>(r1[0].size())};
  g.payoffs = {r1, r2};
  double dev = 0.0;
  if (r2.size() == r1.size()) {
    for (std::size_t i = 0; i < r1.size(); ++i) {
      if (r2[i].size() != r1[i].size()) {
        dev = std::numeric_limits<double>::infinity();
        break;
      }
      for (std::size_t j = 0; j < r1[i].size(); ++j)
        dev = std::max(dev, std::abs(r1[i][j] + r2[i][j]));
    }
  } else {
    dev = std::numeric_limits<double>::infinity();
  }
  g.zero_sum = dev <= kZeroSumTol;
  return g;
}

StrategicFormGame StochasticGame::stage_game(int s) const {
  return StrategicFormGame::from_payoffs(payoffs[0].at(s), payoffs[1].at(s));
}

StationaryStrategy StationaryStrategy::uniform(int states, int actions) {
  if (states < 1 || actions < 1)
    throw std::invalid_argument("StationaryStrategy::uniform: empty shape");
  StationaryStrategy st;
  st.rows.assign(states, uniform_distribution(actions));
  return st;
}

bool StationaryStrategy::valid(double tol) const {
  if (rows.empty()) return false;
  for (const Vec& r : rows)
    if (!is_distribution(r, tol)) return false;
  return true;
}

bool ValidationReport::structurally_sound() const {
  for (const ValidationIssue& i : issues)
    if (i.kind == IssueKind::structure) return false;
  return true;
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const ValidationIssue& i : issues) {
    out << (i.kind == IssueKind::structure ? "structure" : "invariant") << ": "
        << i.message;
    if (i.state >= 0) {
      out << " at (s=" << i.state;
      if (i.a1 >= 0) out << ",a1=" << i.a1;
      if (i.a2 >= 0) out << ",a2=" << i.a2;
      out << ")";
    }
    out << "\n";
  }
  return out.str();
}

ValidationReport validate_game(const StochasticGame& game) {
  ValidationReport rep;
  const int S = game.states;
  const int A1 = game.action_counts[0];
  const int A2 = game.action_counts[1];

  if (S < 1) push(rep, IssueKind::structure, "states must be >= 1");
  if (A1 < 1 || A2 < 1)
    push(rep, IssueKind::structure, "action counts must be >= 1");
  if (!rep.valid()) return rep;

  bool payoff_shape_ok = true;
  for (int i = 0; i < 2; ++i) {
    if (static_cast<int>(game.payoffs[i].size()) != S) {
      push(rep, IssueKind::structure,
           "payoffs[" + std::to_string(i) + "] must have one entry per state");
      payoff_shape_ok = false;
      continue;
    }
    for (int s = 0; s < S; ++s) {
      if (!rectangular(game.payoffs[i][s], A1, A2)) {
        push(rep, IssueKind::structure,
             "payoffs[" + std::to_string(i) + "] has wrong action shape", s);
        payoff_shape_ok = false;
      }
    }
  }

  bool transition_shape_ok = true;
  if (static_cast<int>(game.transitions.size()) != S) {
    push(rep, IssueKind::structure, "transitions must have one entry per state");
    transition_shape_ok = false;
  } else {
    for (int s = 0; s < S; ++s) {
      if (static_cast<int>(game.transitions[s].size()) != A1) {
        push(rep, IssueKind::structure, "transitions has wrong a1 shape", s);
        transition_shape_ok = false;
        continue;
      }
      for (int a1 = 0; a1 < A1; ++a1) {
        if (static_cast<int>(game.transitions[s][a1].size()) != A2) {
          push(rep, IssueKind::structure, "transitions has wrong a2 shape", s, a1);
          transition_shape_ok = false;
          continue;
        }
        for (int a2 = 0; a2 < A2; ++a2)
          if (static_cast<int>(game.transitions[s][a1][a2].size()) != S) {
            push(rep, IssueKind::structure,
                 "transition row must have one entry per successor state", s, a1,
                 a2);
            transition_shape_ok = false;
          }
      }
    }
  }

  if (!(game.gamma >= 0.0 && game.gamma < 1.0))
    push(rep, IssueKind::invariant, "gamma must lie in [0,1)");

  if (payoff_shape_ok) {
    for (int i = 0; i < 2; ++i)
      for (int s = 0; s < S; ++s)
        for (int a1 = 0; a1 < A1; ++a1)
          for (int a2 = 0; a2 < A2; ++a2)
            if (!std::isfinite(game.payoffs[i][s][a1][a2]))
              push(rep, IssueKind::invariant,
                   "payoff entry for player " + std::to_string(i + 1) +
                       " is not finite",
                   s, a1, a2);
  }

  if (transition_shape_ok) {
    for (int s = 0; s < S; ++s)
      for (int a1 = 0; a1 < A1; ++a1)
        for (int a2 = 0; a2 < A2; ++a2) {
          const Vec& row = game.transitions[s][a1][a2];
          double sum = 0.0;
          bool row_ok = true;
          for (double p : row) {
            if (!std::isfinite(p)) {
              push(rep, IssueKind::invariant,
                   "transition probability is not finite", s, a1, a2);
              row_ok = false;
              break;
            }
            if (p < -kSimplexTol) {
              push(rep, IssueKind::invariant, "negative transition probability",
                   s, a1, a2);
              row_ok = false;
              break;
            }
            sum += p;
          }
          if (row_ok && std::abs(sum - 1.0) > kSimplexTol)
            push(rep, IssueKind::invariant,
                 "transition row does not sum to 1", s, a1, a2);
        }
  }

  if (static_cast<int>(game.initial.size()) != S) {
    push(rep, IssueKind::structure,
         "initial distribution must have one entry per state");
  } else if (!is_distribution(game.initial)) {
    push(rep, IssueKind::invariant,
         "initial distribution is not on the simplex");
  }

  return rep;
}

ValidationReport validate_game(const StrategicFormGame& game) {
  ValidationReport rep;
  const int A1 = game.action_counts[0];
  const int A2 = game.action_counts[1];
  if (A1 < 1 || A2 < 1) {
    push(rep, IssueKind::structure, "action counts must be >= 1");
    return rep;
  }
  for (int i = 0; i < 2; ++i)
    if (!rectangular(game.payoffs[i], A1, A2))
      push(rep, IssueKind::structure,
           "payoffs[" + std::to_string(i) + "] has wrong shape");
  if (!rep.structurally_sound()) return rep;

  double dev = 0.0;
  for (int a1 = 0; a1 < A1; ++a1)
    for (int a2 = 0; a2 < A2; ++a2) {
      for (int i = 0; i < 2; ++i)
        if (!std::isfinite(game.payoffs[i][a1][a2]))
          push(rep, IssueKind::invariant, "payoff entry is not finite", -1, a1,
               a2);
      dev = std::max(dev, std::abs(game.payoffs[0][a1][a2] + game.payoffs[1][a1][a2]));
    }
  if (game.zero_sum && dev > kZeroSumTol)
    push(rep, IssueKind::invariant,
         "zero_sum flag set but payoffs do not cancel");
  if (!game.zero_sum && dev <= kZeroSumTol)
    push(rep, IssueKind::invariant,
         "payoffs cancel but zero_sum flag is unset");
  return rep;
}

bool is_zero_sum(const StochasticGame& game, double tol) {
  for (int s = 0; s < game.states; ++s)
    for (int a1 = 0; a1 < game.action_counts[0]; ++a1)
      for (int a2 = 0; a2 < game.action_counts[1]; ++a2)
        if (std::abs(game.payoffs[0][s][a1][a2] + game.payoffs[1][s][a1][a2]) >
            tol)
          return false;
  return true;
}

std::string to_string(ReachabilityLabel label) {
  switch (label) {
    case ReachabilityLabel::case_i: return "case_i";
    case ReachabilityLabel::case_ii: return "case_ii";
    case ReachabilityLabel::case_iii: return "case_iii";
    case ReachabilityLabel::case_iv: return "case_iv";
    case ReachabilityLabel::not_recurrent: return "not_recurrent";
  }
  return "not_recurrent";
}

ReachabilityClass classify_reachability(const StochasticGame& game) {
  const int S = game.states;
  const int A1 = game.action_counts[0];
  const int A2 = game.action_counts[1];

  std::vector<std::vector<bool>> some_action(S, std::vector<bool>(S, false));
  std::vector<std::vector<bool>> every_action(S, std::vector<bool>(S, true));
  for (int s = 0; s < S; ++s)
    for (int t = 0; t < S; ++t) {
      bool any = false, all = true;
      for (int a1 = 0; a1 < A1; ++a1)
        for (int a2 = 0; a2 < A2; ++a2) {
          const bool pos = game.transitions[s][a1][a2][t] > 0.0;
          any = any || pos;
          all = all && pos;
        }
      some_action[s][t] = any;
      every_action[s][t] = all;
    }

  ReachabilityClass rc;
  rc.case_i = true;
  rc.case_ii = true;
  for (int s = 0; s < S && (rc.case_i || rc.case_ii); ++s)
    for (int t = 0; t < S; ++t) {
      rc.case_i = rc.case_i && every_action[s][t];
      rc.case_ii = rc.case_ii && some_action[s][t];
    }

  auto connected = [](std::vector<std::vector<bool>> adj) {
    close_paths(adj);
    return all_true(adj);
  };
  rc.case_iii = connected(every_action);
  rc.case_iv = connected(some_action);

  if (rc.case_i) rc.label = ReachabilityLabel::case_i;
  else if (rc.case_ii) rc.label = ReachabilityLabel::case_ii;
  else if (rc.case_iii) rc.label = ReachabilityLabel::case_iii;
  else if (rc.case_iv) rc.label = ReachabilityLabel::case_iv;
  else rc.label = ReachabilityLabel::not_recurrent;
  return rc;
}

StochasticGame generate_game(const GeneratorSpec& spec, std::uint64_t seed) {
  if (spec.states < 1 || spec.action_counts[0] < 1 || spec.action_counts[1] < 1)
    throw std::invalid_argument("generate_game: counts must be >= 1");
  if (!(spec.gamma >= 0.0 && spec.gamma < 1.0))
    throw std::invalid_argument("generate_game: gamma must lie in [0,1)");
  if (!(spec.payoff_lo <= spec.payoff_hi))
    throw std::invalid_argument("generate_game: empty payoff range");

  const int S = spec.states;
  const int A1 = spec.action_counts[0];
  const int A2 = spec.action_counts[1];
  RngStream rng(seed);

  StochasticGame g;
  g.states = S;
  g.action_counts = spec.action_counts;
  g.gamma = spec.gamma;
  g.initial = uniform_distribution(S);
  g.payoffs[0] = make_tensor3(S, A1, A2);
  g.payoffs[1] = make_tensor3(S, A1, A2);
  for (int s = 0; s < S; ++s)
    for (int a1 = 0; a1 < A1; ++a1)
      for (int a2 = 0; a2 < A2; ++a2) {
        const double r =
            spec.payoff_lo + rng.uniform() * (spec.payoff_hi - spec.payoff_lo);
        g.payoffs[0][s][a1][a2] = r;
        g.payoffs[1][s][a1][a2] = -r;
      }

  g.transitions = make_tensor4(S, A1, A2, S);
  if (spec.target == ReachabilityTarget::case_i) {
    for (int s = 0; s < S; ++s)
      for (int a1 = 0; a1 < A1; ++a1)
        for (int a2 = 0; a2 < A2; ++a2)
          for (int t = 0; t < S; ++t)
            g.transitions[s][a1][a2][t] = kGeneratorFloor + rng.uniform();
  } else {
    // One designated joint action carries each ordered (s, t) link; rows left
    // empty afterwards get a single arbitrary successor.
    for (int s = 0; s < S; ++s)
      for (int t = 0; t < S; ++t) {
        const int a1 = rng.uniform_int(A1);
        const int a2 = rng.uniform_int(A2);
        g.transitions[s][a1][a2][t] = kGeneratorFloor + rng.uniform();
      }
    for (int s = 0; s < S; ++s)
      for (int a1 = 0; a1 < A1; ++a1)
        for (int a2 = 0; a2 < A2; ++a2) {
          double sum = 0.0;
          for (double p : g.transitions[s][a1][a2]) sum += p;
          if (sum == 0.0) {
            const int t = rng.uniform_int(S);
            g.transitions[s][a1][a2][t] = kGeneratorFloor + rng.uniform();
          }
        }
  }
  for (int s = 0; s < S; ++s)
    for (int a1 = 0; a1 < A1; ++a1)
      for (int a2 = 0; a2 < A2; ++a2) {
        Vec& row = g.transitions[s][a1][a2];
        double sum = 0.0;
        for (double p : row) sum += p;
        for (double& p : row) p /= sum;
      }

  g.meta = {{"generator",
             {{"seed", seed},
              {"states", S},
              {"actions", {A1, A2}},
              {"gamma", spec.gamma},
              {"payoff_range", {spec.payoff_lo, spec.payoff_hi}},
              {"target", spec.target == ReachabilityTarget::case_i
                             ? "case_i"
                             : "case_ii"}}}};

  const ReachabilityClass rc = classify_reachability(g);
  const bool satisfied =
      spec.target == ReachabilityTarget::case_i ? rc.case_i : rc.case_ii;
  if (!satisfied)
    throw std::logic_error("generate_game: requested reachability class not met");
  return g;
}

StochasticGame embed_matrix_game(const Mat& r1, double gamma) {
  if (r1.empty() || r1[0].empty())
    throw std::invalid_argument("embed_matrix_game: empty payoff matrix");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("embed_matrix_game: gamma must lie in [0,1)");
  const int A1 = static_cast<int>(r1.size());
  const int A2 = static_cast<int>(r1[0].size());
  StochasticGame g;
  g.states = 1;
  g.action_counts = {A1, A2};
  g.gamma = gamma;
  g.initial = {1.0};
  g.payoffs[0] = {r1};
  Mat r2 = r1;
  for (Vec& row : r2)
    for (double& x : row) x = -x;
  g.payoffs[1] = {r2};
  g.transitions = make_tensor4(1, A1, A2, 1, 1.0);
  return g;
}

Mat matching_pennies_payoffs() {
  return {{1.0, -1.0}, {-1.0, 1.0}};
}

Mat rock_paper_scissors_payoffs() {
  return {{0.0, -1.0, 1.0}, {1.0, 0.0, -1.0}, {-1.0, 1.0, 0.0}};
}

}  // namespace sgdyn
