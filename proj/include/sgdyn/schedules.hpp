#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace sgdyn {

// Invalid run configuration (schedule, pairing, or parameter out of its
// admissible range). The CLI maps this to its config-error exit code.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDefaultRhoAlpha = 0.6;
inline constexpr double kDefaultRhoBeta = 1.0;

// Polynomially vanishing step size step(c) = 1/(c+1)^rho, so step(0) = 1 and
// step(c) stays in (0,1] for every count c >= 0 when rho >= 0.
struct StepSchedule {
  double rho = kDefaultRhoBeta;

  double step(long long c) const {
    return 1.0 / std::pow(static_cast<double>(c + 1), rho);
  }
};

// Admissibility of the fast/slow pair: 1/2 < rho_alpha < rho_beta <= 1.
// This gives square-summable steps whose ratio beta_c/alpha_c vanishes.
// Throws ConfigError naming the violated inequality.
inline void validate_schedule_pair(const StepSchedule& alpha, const StepSchedule& beta) {
  if (!(0.5 < alpha.rho))
    throw ConfigError("step schedules: violated 1/2 < rho_alpha (rho_alpha = " +
                      std::to_string(alpha.rho) + ")");
  if (!(alpha.rho < beta.rho))
    throw ConfigError("step schedules: violated rho_alpha < rho_beta (rho_alpha = " +
                      std::to_string(alpha.rho) + ", rho_beta = " + std::to_string(beta.rho) +
                      ")");
  if (!(beta.rho <= 1.0))
    throw ConfigError("step schedules: violated rho_beta <= 1 (rho_beta = " +
                      std::to_string(beta.rho) + ")");
}

// Same admissibility window for a dynamic keyed on a single schedule.
inline void validate_schedule(const StepSchedule& schedule, const std::string& name) {
  if (!(0.5 < schedule.rho))
    throw ConfigError("step schedules: violated 1/2 < " + name + " (" + name + " = " +
                      std::to_string(schedule.rho) + ")");
  if (!(schedule.rho <= 1.0))
    throw ConfigError("step schedules: violated " + name + " <= 1 (" + name + " = " +
                      std::to_string(schedule.rho) + ")");
}

}  // namespace sgdyn
