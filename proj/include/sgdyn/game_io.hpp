#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "sgdyn/game.hpp"

namespace sgdyn {

// Document is not well-formed or is missing/mistyping a required field.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Document parsed but the resulting game violates a model invariant.
struct ValidationError : std::runtime_error {
  explicit ValidationError(ValidationReport r)
      : std::runtime_error("invalid game:\n" + r.to_string()),
        report(std::move(r)) {}
  ValidationReport report;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// JSON object with fields: states, actions ([A1, A2]), gamma, payoffs
// ([player][s][a1][a2]), transitions ([s][a1][a2][s']), optional initial
// (default uniform) and optional free-form meta.
StochasticGame load_game(const std::string& text);
StochasticGame load_game_file(const std::filesystem::path& path);

std::string save_game(const StochasticGame& game);
void save_game_file(const StochasticGame& game, const std::filesystem::path& path);

}  // namespace sgdyn
