#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "sgdyn/agents.hpp"
#include "sgdyn/diagnostics.hpp"
#include "sgdyn/game.hpp"
#include "sgdyn/planning.hpp"
#include "sgdyn/rng.hpp"

namespace sgdyn {

// A seeded head-to-head run. The game must outlive the config and the run.
struct ExperimentConfig {
  const StochasticGame* game = nullptr;
  std::array<AgentSpec, 2> agents{};
  long long horizon = 1;      // steps K >= 1
  std::uint64_t seed = 0;     // master seed; substreams derive from it
  long long cadence = 1000;   // diagnostic snapshot every `cadence` steps
  double oracle_tolerance = kPlanningTol;
  std::optional<double> lambda;  // drift weighting; defaults from gamma
  bool record_steps = true;      // keep the per-step trace in memory
};

struct StepRecord {
  long long k = 0;
  int state = 0;
  int a1 = 0;
  int a2 = 0;
  double r1 = 0.0;
  double r2 = 0.0;
};

struct ExperimentTrace {
  std::vector<StepRecord> steps;  // empty when record_steps is off
  // Snapshots at k = cadence, 2*cadence, ..., always ending with k = K.
  std::vector<DiagnosticSnapshot> snapshots;
  std::array<double, 2> discounted_returns{0.0, 0.0};  // realized, from k = 0
  long long horizon = 0;
  std::uint64_t seed = 0;

  const DiagnosticSnapshot& final_snapshot() const { return snapshots.back(); }
};

// Next state drawn from the stored transition row by inverse CDF; consumes
// exactly one draw.
int sample_transition(const StochasticGame& game, int state, int a1, int a2,
                      RngStream& rng);

// Sum over recorded steps of gamma^k * r_k for the player.
double discounted_return(const ExperimentTrace& trace, int player, double gamma);

// Runs the configured match. Deterministic: one RNG substream per consumer
// (environment, then one per seat), all derived from the master seed, so
// identical configs give identical traces. Throws ConfigError on invalid
// configs and std::logic_error if a belief invariant breaks mid-run.
ExperimentTrace run(const ExperimentConfig& config);

// Same, with caller-built agents that stay owned by the caller, so beliefs
// remain inspectable after the run. The seat order must match the config's
// agent specs (used for the diagnostic bound parameters).
ExperimentTrace run(const ExperimentConfig& config,
                    std::array<std::unique_ptr<Agent>, 2>& agents);

}  // namespace sgdyn
