#include "sgdyn/artifacts.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "sgdyn/game_io.hpp"

namespace sgdyn {
namespace {

void append_row(std::string& out, long long k, const char* metric, int player, int state,
                double value) {
  out += std::to_string(k);
  out += ',';
  out += metric;
  out += ',';
  out += std::to_string(player);
  out += ',';
  out += std::to_string(state);
  out += ',';
  out += format_double(value);
  out += '\n';
}

// Max over a possibly-absent per-state vector; null when absent.
nlohmann::json max_or_null(const Vec& v) {
  if (v.empty()) return nullptr;
  double m = v[0];
  for (double x : v) m = std::max(m, x);
  return m;
}

nlohmann::json vec_or_null(const Vec& v) {
  if (v.empty()) return nullptr;
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << text;
    if (!out.flush()) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string());
}

std::string trace_csv(const ExperimentTrace& trace) {
  std::string out = "k,state,a1,a2,r1,r2\n";
  for (const StepRecord& rec : trace.steps) {
    out += std::to_string(rec.k);
    out += ',';
    out += std::to_string(rec.state);
    out += ',';
    out += std::to_string(rec.a1);
    out += ',';
    out += std::to_string(rec.a2);
    out += ',';
    out += format_double(rec.r1);
    out += ',';
    out += format_double(rec.r2);
    out += '\n';
  }
  return out;
}

std::string snapshot_csv(const ExperimentTrace& trace) {
  std::string out = "k,metric,player,state,value\n";
  for (const DiagnosticSnapshot& snap : trace.snapshots) {
    const int states = static_cast<int>(snap.V.size());
    for (int s = 0; s < states; ++s) append_row(out, snap.k, "V", -1, s, snap.V[s]);
    for (int s = 0; s < static_cast<int>(snap.Vstar.size()); ++s)
      append_row(out, snap.k, "Vstar", -1, s, snap.Vstar[s]);
    for (int s = 0; s < static_cast<int>(snap.drift.size()); ++s)
      append_row(out, snap.k, "drift", -1, s, snap.drift[s]);
    for (int i = 0; i < 2; ++i)
      for (int s = 0; s < static_cast<int>(snap.q_err[i].size()); ++s)
        append_row(out, snap.k, "q_err", i, s, snap.q_err[i][s]);
    for (int i = 0; i < 2; ++i)
      for (int s = 0; s < static_cast<int>(snap.v_err[i].size()); ++s)
        append_row(out, snap.k, "v_err", i, s, snap.v_err[i][s]);
    for (int i = 0; i < static_cast<int>(snap.nash_gap.size()); ++i)
      for (int s = 0; s < static_cast<int>(snap.nash_gap[i].size()); ++s)
        append_row(out, snap.k, "nash_gap", i, s, snap.nash_gap[i][s]);
    if (snap.bounds.model_free_v)
      append_row(out, snap.k, "bound_mf_v", -1, -1, *snap.bounds.model_free_v);
    append_row(out, snap.k, "bound_mf_q", -1, -1, snap.bounds.model_free_q);
    append_row(out, snap.k, "bound_min_v", -1, -1, snap.bounds.minimal_v);
    append_row(out, snap.k, "bound_min_pi", -1, -1, snap.bounds.minimal_strategy);
  }
  return out;
}

nlohmann::json summary_json(const ExperimentTrace& trace) {
  const DiagnosticSnapshot& fin = trace.final_snapshot();
  nlohmann::json j;
  j["seed"] = trace.seed;
  j["horizon"] = trace.horizon;
  j["discounted_returns"] = trace.discounted_returns;

  nlohmann::json final;
  final["k"] = fin.k;
  final["nash_gap"] = fin.nash_gap_max;
  final["nash_gap_per_player"] = fin.nash_gap;
  final["V"] = max_or_null(fin.V);
  final["V_per_state"] = vec_or_null(fin.V);
  final["Vstar"] = max_or_null(fin.Vstar);
  final["drift"] = max_or_null(fin.drift);
  final["drift_per_state"] = vec_or_null(fin.drift);
  for (int i = 0; i < 2; ++i) {
    const std::string suffix = "_p" + std::to_string(i + 1);
    final["q_err" + suffix] = max_or_null(fin.q_err[i]);
    final["v_err" + suffix] = max_or_null(fin.v_err[i]);
  }
  j["final"] = std::move(final);

  nlohmann::json bounds;
  bounds["D"] = fin.bounds.D;
  bounds["model_free_v"] = fin.bounds.model_free_v ? nlohmann::json(*fin.bounds.model_free_v)
                                                   : nlohmann::json(nullptr);
  bounds["model_free_q"] = fin.bounds.model_free_q;
  bounds["g_lambda"] = fin.bounds.g_lambda;
  bounds["g_gamma"] = fin.bounds.g_gamma;
  bounds["minimal_v"] = fin.bounds.minimal_v;
  bounds["minimal_v_gamma_sub"] = fin.bounds.minimal_v_gamma_sub;
  bounds["minimal_strategy"] = fin.bounds.minimal_strategy;
  bounds["minimal_strategy_gamma_sub"] = fin.bounds.minimal_strategy_gamma_sub;
  j["bounds"] = std::move(bounds);
  return j;
}

}  // namespace sgdyn
