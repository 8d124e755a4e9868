#include "sgdyn/game_io.hpp"

#include <fstream>
#include <sstream>

namespace sgdyn {
namespace {

using nlohmann::json;

const json& require_field(const json& j, const char* name) {
  if (!j.contains(name))
    throw ParseError(std::string("missing field: ") + name);
  return j.at(name);
}

double to_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError("field " + path + " must be a number");
  return j.get<double>();
}

int to_int(const json& j, const std::string& path) {
  if (!j.is_number_integer())
    throw ParseError("field " + path + " must be an integer");
  return j.get<int>();
}

Vec to_vec(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError("field " + path + " must be an array");
  Vec v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(to_number(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

Mat to_mat(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError("field " + path + " must be an array");
  Mat m;
  m.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    m.push_back(to_vec(j[i], path + "[" + std::to_string(i) + "]"));
  return m;
}

Tensor3 to_tensor3(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError("field " + path + " must be an array");
  Tensor3 t;
  t.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    t.push_back(to_mat(j[i], path + "[" + std::to_string(i) + "]"));
  return t;
}

Tensor4 to_tensor4(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError("field " + path + " must be an array");
  Tensor4 t;
  t.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    t.push_back(to_tensor3(j[i], path + "[" + std::to_string(i) + "]"));
  return t;
}

}  // namespace

StochasticGame load_game(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("top-level value must be an object");

  StochasticGame g;
  g.states = to_int(require_field(doc, "states"), "states");

  const json& actions = require_field(doc, "actions");
  if (!actions.is_array() || actions.size() != 2)
    throw ParseError("field actions must be an array of two integers");
  g.action_counts = {to_int(actions[0], "actions[0]"),
                     to_int(actions[1], "actions[1]")};

  g.gamma = to_number(require_field(doc, "gamma"), "gamma");

  const json& payoffs = require_field(doc, "payoffs");
  if (!payoffs.is_array() || payoffs.size() != 2)
    throw ParseError("field payoffs must be an array of two tensors");
  g.payoffs[0] = to_tensor3(payoffs[0], "payoffs[0]");
  g.payoffs[1] = to_tensor3(payoffs[1], "payoffs[1]");

  g.transitions = to_tensor4(require_field(doc, "transitions"), "transitions");

  if (doc.contains("initial")) {
    g.initial = to_vec(doc.at("initial"), "initial");
  } else if (g.states >= 1) {
    g.initial = uniform_distribution(g.states);
  }

  if (doc.contains("meta")) g.meta = doc.at("meta");

  const ValidationReport report = validate_game(g);
  if (!report.valid()) throw ValidationError(report);
  return g;
}

StochasticGame load_game_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path.string());
  return load_game(buf.str());
}

std::string save_game(const StochasticGame& game) {
  json doc;
  doc["states"] = game.states;
  doc["actions"] = {game.action_counts[0], game.action_counts[1]};
  doc["gamma"] = game.gamma;
  doc["initial"] = game.initial;
  doc["payoffs"] = {game.payoffs[0], game.payoffs[1]};
  doc["transitions"] = game.transitions;
  doc["meta"] = game.meta;
  return doc.dump(2) + "\n";
}

void save_game_file(const StochasticGame& game, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << save_game(game);
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace sgdyn
