#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sgdyn/game.hpp"
#include "sgdyn/game_io.hpp"
#include "sgdyn/rng.hpp"

using namespace sgdyn;

namespace {

StochasticGame two_state_uniform_game(double gamma = 0.9) {
  StochasticGame g;
  g.states = 2;
  g.action_counts = {2, 2};
  g.gamma = gamma;
  g.initial = {0.5, 0.5};
  g.payoffs[0] = make_tensor3(2, 2, 2, 1.0);
  g.payoffs[1] = make_tensor3(2, 2, 2, -1.0);
  g.transitions = make_tensor4(2, 2, 2, 2, 0.5);
  return g;
}

// Reachability of ordered pairs via explicit walk enumeration: unions of
// boolean adjacency powers up to length |S|. Independent of the classifier's
// closure routine.
std::vector<std::vector<bool>> reachable_by_walks(
    const std::vector<std::vector<bool>>& adj) {
  const int n = static_cast<int>(adj.size());
  auto mul = [n](const std::vector<std::vector<bool>>& a,
                 const std::vector<std::vector<bool>>& b) {
    std::vector<std::vector<bool>> c(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        if (a[i][k])
          for (int j = 0; j < n; ++j)
            if (b[k][j]) c[i][j] = true;
    return c;
  };
  std::vector<std::vector<bool>> power = adj;
  std::vector<std::vector<bool>> reach = adj;
  for (int len = 2; len <= n; ++len) {
    power = mul(power, adj);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (power[i][j]) reach[i][j] = true;
  }
  return reach;
}

bool oracle_connected(const StochasticGame& g, bool min_edges) {
  const int S = g.states;
  std::vector<std::vector<bool>> adj(S, std::vector<bool>(S, false));
  for (int s = 0; s < S; ++s)
    for (int t = 0; t < S; ++t) {
      bool any = false, all = true;
      for (int a1 = 0; a1 < g.action_counts[0]; ++a1)
        for (int a2 = 0; a2 < g.action_counts[1]; ++a2) {
          const bool pos = g.transitions[s][a1][a2][t] > 0.0;
          any = any || pos;
          all = all && pos;
        }
      adj[s][t] = min_edges ? all : any;
    }
  const auto reach = reachable_by_walks(adj);
  for (const auto& row : reach)
    for (bool x : row)
      if (!x) return false;
  return true;
}

}  // namespace

TEST_CASE("validate_game accepts a well-formed game") {
  CHECK(validate_game(two_state_uniform_game()).valid());
}

TEST_CASE("validate_game reports a row not summing to one with its location") {
  auto g = two_state_uniform_game();
  g.transitions[1][0][1] = {0.49, 0.49};
  const auto rep = validate_game(g);
  REQUIRE(rep.issues.size() == 1);
  CHECK(rep.issues[0].kind == IssueKind::invariant);
  CHECK(rep.issues[0].state == 1);
  CHECK(rep.issues[0].a1 == 0);
  CHECK(rep.issues[0].a2 == 1);
  CHECK(rep.issues[0].message.find("sum") != std::string::npos);
}

TEST_CASE("validate_game reports negative probabilities and bad discounts") {
  auto g = two_state_uniform_game();
  g.transitions[0][1][1] = {1.2, -0.2};
  g.gamma = 1.0;
  const auto rep = validate_game(g);
  CHECK_FALSE(rep.valid());
  bool saw_negative = false, saw_gamma = false;
  for (const auto& issue : rep.issues) {
    if (issue.message.find("negative") != std::string::npos) {
      saw_negative = true;
      CHECK(issue.state == 0);
      CHECK(issue.a1 == 1);
      CHECK(issue.a2 == 1);
    }
    if (issue.message.find("gamma") != std::string::npos) saw_gamma = true;
  }
  CHECK(saw_negative);
  CHECK(saw_gamma);
}

TEST_CASE("shape mismatches are structural, not invariant, issues") {
  auto g = two_state_uniform_game();
  g.payoffs[0][1][0].pop_back();
  const auto rep = validate_game(g);
  CHECK_FALSE(rep.valid());
  CHECK_FALSE(rep.structurally_sound());

  auto g2 = two_state_uniform_game();
  g2.transitions[0][0][0].push_back(0.0);
  const auto rep2 = validate_game(g2);
  CHECK_FALSE(rep2.structurally_sound());

  auto g3 = two_state_uniform_game();
  g3.initial = {1.0};
  CHECK_FALSE(validate_game(g3).structurally_sound());
}

TEST_CASE("all-positive transitions classify as the strongest case") {
  const auto rc = classify_reachability(two_state_uniform_game());
  CHECK(rc.case_i);
  CHECK(rc.case_ii);
  CHECK(rc.case_iii);
  CHECK(rc.case_iv);
  CHECK(rc.label == ReachabilityLabel::case_i);
}

TEST_CASE("action-gated link gives case_ii and case_iv only") {
  // s0 -> s1 possible only under joint action (0,0); s1 -> s0 always possible.
  auto g = two_state_uniform_game();
  for (int a1 = 0; a1 < 2; ++a1)
    for (int a2 = 0; a2 < 2; ++a2)
      g.transitions[0][a1][a2] = (a1 == 0 && a2 == 0) ? Vec{0.5, 0.5} : Vec{1.0, 0.0};
  const auto rc = classify_reachability(g);
  CHECK_FALSE(rc.case_i);
  CHECK(rc.case_ii);
  CHECK_FALSE(rc.case_iii);
  CHECK(rc.case_iv);
  CHECK(rc.label == ReachabilityLabel::case_ii);
}

TEST_CASE("an absorbing state makes the game not recurrent") {
  auto g = two_state_uniform_game();
  for (int a1 = 0; a1 < 2; ++a1)
    for (int a2 = 0; a2 < 2; ++a2)
      g.transitions[1][a1][a2] = {0.0, 1.0};
  const auto rc = classify_reachability(g);
  CHECK_FALSE(rc.case_i);
  CHECK_FALSE(rc.case_ii);
  CHECK_FALSE(rc.case_iii);
  CHECK_FALSE(rc.case_iv);
  CHECK(rc.label == ReachabilityLabel::not_recurrent);
}

TEST_CASE("case_iii without case_ii: guaranteed cycle, no direct return") {
  // Every action moves deterministically s0 -> s1 and s1 -> s0; both OK, but
  // no action links a state to itself.
  auto g = two_state_uniform_game();
  for (int a1 = 0; a1 < 2; ++a1)
    for (int a2 = 0; a2 < 2; ++a2) {
      g.transitions[0][a1][a2] = {0.0, 1.0};
      g.transitions[1][a1][a2] = {1.0, 0.0};
    }
  const auto rc = classify_reachability(g);
  CHECK_FALSE(rc.case_i);
  CHECK_FALSE(rc.case_ii);
  CHECK(rc.case_iii);
  CHECK(rc.case_iv);
  CHECK(rc.label == ReachabilityLabel::case_iii);
}

TEST_CASE("containment lattice holds on randomized small games") {
  RngStream rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int S = 1 + rng.uniform_int(4);
    const int A1 = 1 + rng.uniform_int(2);
    const int A2 = 1 + rng.uniform_int(2);
    StochasticGame g;
    g.states = S;
    g.action_counts = {A1, A2};
    g.gamma = 0.5;
    g.initial = uniform_distribution(S);
    g.payoffs[0] = make_tensor3(S, A1, A2);
    g.payoffs[1] = make_tensor3(S, A1, A2);
    g.transitions = make_tensor4(S, A1, A2, S);
    for (int s = 0; s < S; ++s)
      for (int a1 = 0; a1 < A1; ++a1)
        for (int a2 = 0; a2 < A2; ++a2) {
          Vec& row = g.transitions[s][a1][a2];
          double sum = 0.0;
          for (int t = 0; t < S; ++t) {
            row[t] = rng.uniform() < 0.45 ? rng.uniform() : 0.0;
            sum += row[t];
          }
          if (sum == 0.0) {
            row[rng.uniform_int(S)] = 1.0;
            sum = 1.0;
          }
          for (double& p : row) p /= sum;
        }
    REQUIRE(validate_game(g).valid());
    const auto rc = classify_reachability(g);
    if (rc.case_i) {
      CHECK(rc.case_ii);
      CHECK(rc.case_iii);
    }
    if (rc.case_ii || rc.case_iii) CHECK(rc.case_iv);
    CHECK(rc.case_iii == oracle_connected(g, true));
    CHECK(rc.case_iv == oracle_connected(g, false));
  }
}

TEST_CASE("generator is deterministic and exactly zero-sum") {
  GeneratorSpec spec;
  spec.states = 3;
  spec.action_counts = {2, 3};
  spec.gamma = 0.7;
  const auto a = generate_game(spec, 42);
  const auto b = generate_game(spec, 42);
  CHECK(a.payoffs[0] == b.payoffs[0]);
  CHECK(a.payoffs[1] == b.payoffs[1]);
  CHECK(a.transitions == b.transitions);
  CHECK(a.meta == b.meta);

  const auto c = generate_game(spec, 43);
  CHECK(a.payoffs[0] != c.payoffs[0]);

  for (int s = 0; s < a.states; ++s)
    for (int a1 = 0; a1 < 2; ++a1)
      for (int a2 = 0; a2 < 3; ++a2)
        CHECK(a.payoffs[1][s][a1][a2] == -a.payoffs[0][s][a1][a2]);
}

TEST_CASE("generated case_i games validate, classify, and stay positive") {
  GeneratorSpec spec;
  spec.states = 3;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = generate_game(spec, seed);
    CHECK(validate_game(g).valid());
    CHECK(classify_reachability(g).label == ReachabilityLabel::case_i);
    for (const auto& per_state : g.transitions)
      for (const auto& per_a1 : per_state)
        for (const auto& row : per_a1)
          for (double p : row) CHECK(p > 0.0);
    for (int s = 0; s < g.states; ++s)
      for (int a1 = 0; a1 < 2; ++a1)
        for (int a2 = 0; a2 < 2; ++a2) {
          double sum = 0.0;
          for (double p : g.transitions[s][a1][a2]) sum += p;
          CHECK(std::abs(sum - 1.0) <= 1e-9);
        }
  }
}

TEST_CASE("case_ii target is honored; single-state reports the stronger class") {
  GeneratorSpec spec;
  spec.states = 3;
  spec.target = ReachabilityTarget::case_ii;
  bool saw_non_case_i = false;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = generate_game(spec, seed);
    CHECK(validate_game(g).valid());
    CHECK(classify_reachability(g).case_ii);
    if (!classify_reachability(g).case_i) saw_non_case_i = true;
  }
  CHECK(saw_non_case_i);

  spec.states = 1;
  const auto single = generate_game(spec, 5);
  CHECK(classify_reachability(single).label == ReachabilityLabel::case_i);
}

TEST_CASE("payoffs respect the configured range") {
  GeneratorSpec spec;
  spec.payoff_lo = 2.0;
  spec.payoff_hi = 3.0;
  const auto g = generate_game(spec, 11);
  for (const auto& per_state : g.payoffs[0])
    for (const auto& per_a1 : per_state)
      for (double r : per_a1) {
        CHECK(r >= 2.0);
        CHECK(r < 3.0);
      }
}

TEST_CASE("save and load round-trip a generated game exactly") {
  GeneratorSpec spec;
  spec.states = 2;
  spec.gamma = 0.3;
  const auto g = generate_game(spec, 77);
  const std::string text = save_game(g);
  const auto g2 = load_game(text);
  CHECK(g2.states == g.states);
  CHECK(g2.action_counts == g.action_counts);
  CHECK(g2.gamma == g.gamma);
  CHECK(g2.initial == g.initial);
  CHECK(g2.payoffs[0] == g.payoffs[0]);
  CHECK(g2.payoffs[1] == g.payoffs[1]);
  CHECK(g2.transitions == g.transitions);
  CHECK(g2.meta == g.meta);
  CHECK(save_game(g2) == text);
}

TEST_CASE("minimal document loads with a default uniform initial distribution") {
  const std::string text = R"({
    "states": 1,
    "actions": [2, 2],
    "gamma": 0.0,
    "payoffs": [[[[1, -1], [-1, 1]]], [[[-1, 1], [1, -1]]]],
    "transitions": [[[[1.0], [1.0]], [[1.0], [1.0]]]]
  })";
  const auto g = load_game(text);
  CHECK(g.states == 1);
  CHECK(g.initial == Vec{1.0});
  CHECK(g.meta.is_object());
  CHECK(g.payoffs[0][0][0][0] == 1.0);
}

TEST_CASE("missing transitions block is a parse error naming the field") {
  const std::string text = R"({
    "states": 1,
    "actions": [1, 1],
    "gamma": 0.5,
    "payoffs": [[[[0]]], [[[0]]]]
  })";
  CHECK_THROWS_WITH_AS(load_game(text), doctest::Contains("transitions"),
                       ParseError);
}

TEST_CASE("malformed JSON and wrong field types are parse errors") {
  CHECK_THROWS_AS(load_game("{"), ParseError);
  CHECK_THROWS_AS(load_game("[1,2,3]"), ParseError);
  CHECK_THROWS_AS(load_game(R"({"states": "three"})"), ParseError);
  const std::string bad_actions = R"({
    "states": 1, "actions": [2], "gamma": 0.5,
    "payoffs": [[[[0,0],[0,0]]], [[[0,0],[0,0]]]],
    "transitions": [[[[1.0],[1.0]],[[1.0],[1.0]]]]
  })";
  CHECK_THROWS_AS(load_game(bad_actions), ParseError);
}

TEST_CASE("negative probability in a document is a validation error") {
  const std::string text = R"({
    "states": 2,
    "actions": [1, 1],
    "gamma": 0.5,
    "payoffs": [[[[0]], [[0]]], [[[0]], [[0]]]],
    "transitions": [[[[1.2, -0.2]]], [[[0.5, 0.5]]]]
  })";
  CHECK_THROWS_AS(load_game(text), ValidationError);
  try {
    load_game(text);
  } catch (const ValidationError& e) {
    REQUIRE_FALSE(e.report.valid());
    CHECK(e.report.issues[0].message.find("negative") != std::string::npos);
  }
}

TEST_CASE("meta survives the round trip") {
  auto g = embed_matrix_game(matching_pennies_payoffs(), 0.0);
  g.meta = {{"name", "matching-pennies"}, {"tags", {"builtin", "zero-sum"}}};
  const auto g2 = load_game(save_game(g));
  CHECK(g2.meta == g.meta);
}

TEST_CASE("embedded matrix game is a valid single-state stochastic game") {
  const auto g = embed_matrix_game(rock_paper_scissors_payoffs(), 0.5);
  CHECK(validate_game(g).valid());
  CHECK(g.states == 1);
  CHECK(g.action_counts == std::array<int, 2>{3, 3});
  CHECK(is_zero_sum(g));
  CHECK(classify_reachability(g).label == ReachabilityLabel::case_i);
}

TEST_CASE("strategic-form zero-sum flag tracks the payoff tensors") {
  const auto zs = StrategicFormGame::zero_sum_from(matching_pennies_payoffs());
  CHECK(zs.zero_sum);
  CHECK(validate_game(zs).valid());

  auto broken = zs;
  broken.payoffs[1][0][0] = 5.0;
  CHECK_FALSE(validate_game(broken).valid());

  const auto gs = StrategicFormGame::from_payoffs({{1.0}}, {{1.0}});
  CHECK_FALSE(gs.zero_sum);
  CHECK(validate_game(gs).valid());
}

TEST_CASE("stationary strategies validate row by row") {
  auto st = StationaryStrategy::uniform(3, 2);
  CHECK(st.valid());
  st.rows[2] = {0.9, 0.2};
  CHECK_FALSE(st.valid());
}
