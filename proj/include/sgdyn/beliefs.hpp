#pragma once

#include <string>
#include <vector>

#include "sgdyn/game.hpp"
#include "sgdyn/rng.hpp"
#include "sgdyn/schedules.hpp"
#include "sgdyn/types.hpp"

namespace sgdyn {

// What a learner knows and gets to see each step. Levels are cumulative:
// model_based additionally knows the payoff and transition functions,
// model_free additionally observes the opponent's action, minimal sees only
// the state, its own action, and its own stage reward.
enum class ObservationLevel { model_based, model_free, minimal };

std::string to_string(ObservationLevel level);

using CountVec = std::vector<long long>;
using CountMat = std::vector<CountVec>;
using CountTensor3 = std::vector<CountMat>;

// Everything a learning rule carries between steps. Containers a rule does
// not use stay empty. Counters count completed updates, so the first update
// touching a state reads step(0) = 1.
struct AgentBelief {
  Mat pi_hat;        // [s][opponent action], rows on the simplex
  Tensor3 q_joint;   // [s][a1][a2], own joint-action payoff estimate
  Mat q_local;       // [s][own action]
  Vec v_hat;         // [s]
  Mat pi_avg;        // [s][own action], time-averaged smoothed best response
  CountVec state_visits;      // c(s)
  CountMat local_visits;      // c(s, own action)
  CountTensor3 joint_visits;  // c(s, a1, a2)
};

// pi_hat uniform; one state's worth of counters.
AgentBelief make_fp_belief(const StochasticGame& game, int player);
// pi_hat uniform, q_joint zero; joint visit counters only for the
// model-free variant, whose q steps are keyed per joint action.
AgentBelief make_ttfp_belief(const StochasticGame& game, int player, bool track_joint_visits);
// q_joint zero plus state and joint visit counters; no opponent model.
AgentBelief make_minimax_q_belief(const StochasticGame& game);
// q_local zero plus state and own-action visit counters.
AgentBelief make_q_learning_belief(const StochasticGame& game, int player);
// q_local and v_hat zero, pi_avg uniform, state visit counters.
AgentBelief make_decentralized_q_belief(const StochasticGame& game, int player);

// ---- classical fictitious play (single-state strategic form) ----

// pi_hat += (one_hot(a_opp) - pi_hat)/(k+1), with k the number of plays
// already folded in; started from k = 0 this keeps pi_hat equal to the
// empirical frequency of the opponent's actions.
void fp_observe(Vec& pi_hat, int opponent_action, long long k);

// Exact best response against the belief, smallest index on ties.
int fp_act(const Vec& pi_hat, const StrategicFormGame& game, int player);

// ---- two-timescale fictitious play ----

// Expected own payoff of each own action at `state` under pi_hat(state).
Vec expected_q_row(const AgentBelief& belief, int state, int player);

// Value estimate: max over own actions of the expected payoff row.
double belief_value(const AgentBelief& belief, int state, int player);

// Greedy action: argmax of expected_q_row, smallest index on ties.
int ttfp_act(const AgentBelief& belief, int state, int player);

// Exploring variant. One uniform draw always decides exploration (consumed
// even when epsilon is 0 or 1); if it triggers (u < epsilon) a second draw
// picks a uniform own action.
int ttfp_act(const AgentBelief& belief, int state, int player, double epsilon,
             RngStream& rng);

// Model-based update at the visited state: pi_hat(s) moves toward the
// observed opponent action with step alpha_{c(s)}; then every joint entry
// of q_joint(s) moves with step beta_{c(s)} toward
//   r(s,a) + gamma * sum_s' p(s'|s,a) * vhat(s'),
// with vhat evaluated once from the post-pi-update, pre-q-update belief;
// beliefs at other states stay untouched; finally c(s) increments.
void ttfp_observe_model_based(AgentBelief& belief, const StochasticGame& game,
                              int player, int state, int opponent_action,
                              const StepSchedule& alpha, const StepSchedule& beta);

// Joint transition record as seen by one player; `reward` is that player's
// own stage payoff.
struct TransitionRecord {
  int state = 0;
  int a1 = 0;
  int a2 = 0;
  double reward = 0.0;
  int next_state = 0;
};

// Model-free update: pi_hat(s) as above with alpha_{c(s)}; q_joint touched
// only at the realized joint action, moving with step beta_{c(s,a)} toward
//   reward + gamma * max over own actions of E_{pi_hat(s')} q_joint(s',.);
// finally c(s) and c(s,a) increment.
void ttfp_observe_model_free(AgentBelief& belief, int player, const TransitionRecord& t,
                             double gamma, const StepSchedule& alpha,
                             const StepSchedule& beta);

// ---- tabular Q-learning over own actions ----

// q(s,a) moves with step beta_{counters[s][a]} toward
// r + gamma * max_a' q(s',a'); other entries untouched. Counters are read
// here and advanced by the caller once the whole step completes.
void q_learning_update(Mat& q_local, const CountMat& counters, int state, int action,
                       double reward, int next_state, double gamma,
                       const StepSchedule& beta);

// ---- minimax-Q ----

// q(s,a1,a2) moves with step beta_{counters[s][a1][a2]} toward
// r + gamma * val(q(s',.)), the matrix-game value of the next state's stage
// estimate from `player`'s side. Counters are read, not advanced.
void minimax_q_update(Tensor3& q_joint, const CountTensor3& counters, int player,
                      int state, int a1, int a2, double reward, int next_state,
                      double gamma, const StepSchedule& beta);

// ---- smoothed best response and its learners ----

// Logit distribution exp(q/tau) normalized, computed with max subtraction.
// Entries are strictly positive whenever (max q - min q)/tau stays clear of
// the exp underflow threshold (about 745). Throws ConfigError on tau <= 0.
Vec smoothed_best_response(const Vec& q, double tau);

// Importance-weighted payoff tracking for the taken action:
// q(a) += min(1, alpha_k / br[a]) * (reward - q(a)); the clamp at 1 keeps
// the iterate a convex combination. Throws on br[a] <= 0.
void individual_q_update(Vec& q_row, int action, double reward, const Vec& br,
                         const StepSchedule& alpha, long long k);

// Minimal-information stochastic-game update. Computes br from the
// pre-update q row, moves q(s, own_action) with the clamped importance step
// min(1, alpha_{c(s)}/br[a]) toward reward + gamma * v_hat(s'), then moves
// v_hat(s) with step beta_{c(s)} toward the br-expectation of the
// pre-update q row, and increments c(s). Returns the br row it used, which
// is also the acting distribution of this step.
Vec decentralized_q_observe(AgentBelief& belief, int state, int own_action,
                            double reward, int next_state, double gamma,
                            const StepSchedule& alpha, const StepSchedule& beta,
                            double tau);

// pi_avg tracks the smoothed best responses played at visited states:
// pi += alpha * (br - pi) when is_current_state, unchanged otherwise.
void averaged_strategy_update(Vec& pi_avg_row, const Vec& br, double alpha,
                              bool is_current_state);

}  // namespace sgdyn
