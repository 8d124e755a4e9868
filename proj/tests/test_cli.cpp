#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "sgdyn/game.hpp"
#include "sgdyn/game_io.hpp"

using namespace sgdyn;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const fs::path& stdout_file = {},
            const fs::path& stderr_file = {}) {
  std::string cmd = std::string(SGDYN_CLI_BIN) + " " + args;
  cmd += stdout_file.empty() ? " > /dev/null" : (" > " + stdout_file.string());
  cmd += stderr_file.empty() ? " 2> /dev/null" : (" 2> " + stderr_file.string());
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

long long line_count(const std::string& text) {
  long long n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

// Fresh scratch directory under the test's working directory.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path("cli_scratch") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("solve prints the matching-pennies value and writes the solution") {
  const fs::path dir = scratch("solve_mp");
  const fs::path out = dir / "stdout.txt";
  const int rc = run_cli("solve --game builtin:matching-pennies --gamma 0 --out " +
                             (dir / "sol").string(),
                         out);
  CHECK(rc == 0);
  const std::string text = read_file(out);
  CHECK(text.find("value[player 1] = 0") != std::string::npos);

  const nlohmann::json sol = nlohmann::json::parse(read_file(dir / "sol" / "solution.json"));
  CHECK(std::abs(sol.at("values")[0][0].get<double>()) <= 1e-9);
  CHECK(sol.at("strategies")[0][0][0].get<double>() == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(sol.at("residual").get<double>() <= 1e-10);
}

TEST_CASE("file problems map to distinct exit codes") {
  const fs::path dir = scratch("errors");

  CHECK(run_cli("solve --game " + (dir / "missing.json").string()) == 2);

  std::ofstream(dir / "broken.json") << "{ this is not json";
  CHECK(run_cli("solve --game " + (dir / "broken.json").string()) == 3);

  // Parses cleanly but the transition row is not a distribution.
  std::ofstream(dir / "invalid.json") << R"({
    "states": 1, "actions": [1, 1], "gamma": 0.5,
    "payoffs": [[[[1.0]]], [[[-1.0]]]],
    "transitions": [[[[0.4]]]]
  })";
  CHECK(run_cli("solve --game " + (dir / "invalid.json").string()) == 4);
}

TEST_CASE("impossible pairings and unknown names exit with the config code") {
  CHECK(run_cli("run --game builtin:matching-pennies --dynamics minimax-q --level minimal") == 5);
  CHECK(run_cli("run --game builtin:matching-pennies --dynamics warp-drive") == 5);
  CHECK(run_cli("run --game builtin:nonsense") == 5);
  CHECK(run_cli("run --game builtin:matching-pennies --dynamics ttfp-mb --rho-alpha 0.5") == 5);
}

TEST_CASE("rerunning identical flags reproduces every artifact byte") {
  const fs::path dir = scratch("determinism");
  const std::string flags =
      "run --game builtin:random-zs --gen-states 3 --gen-seed 11 --dynamics ttfp-mf "
      "--horizon 800 --seed 9 --cadence 200 --out ";
  CHECK(run_cli(flags + (dir / "a").string()) == 0);
  CHECK(run_cli(flags + (dir / "b").string()) == 0);

  for (const char* name : {"trace.csv", "snapshots.csv", "summary.json"})
    CHECK(read_file(dir / "a" / name) == read_file(dir / "b" / name));

  // A different seed must change the realized trace.
  const std::string reseeded =
      "run --game builtin:random-zs --gen-states 3 --gen-seed 11 --dynamics ttfp-mf "
      "--horizon 800 --seed 10 --cadence 200 --out " +
      (dir / "c").string();
  CHECK(run_cli(reseeded) == 0);
  CHECK(read_file(dir / "a" / "trace.csv") != read_file(dir / "c" / "trace.csv"));
}

TEST_CASE("run artifacts are complete and well-formed") {
  const fs::path dir = scratch("artifacts") / "run";
  CHECK(run_cli("run --game builtin:matching-pennies --dynamics ttfp-mb --horizon 250 "
                "--cadence 100 --seed 3 --out " +
                dir.string()) == 0);

  const std::string trace = read_file(dir / "trace.csv");
  CHECK(trace.rfind("k,state,a1,a2,r1,r2\n", 0) == 0);
  CHECK(line_count(trace) == 251);  // header + one row per step

  const std::string snapshots = read_file(dir / "snapshots.csv");
  CHECK(snapshots.rfind("k,metric,player,state,value\n", 0) == 0);
  CHECK(snapshots.find(",nash_gap,") != std::string::npos);
  CHECK(snapshots.find(",bound_mf_q,") != std::string::npos);

  const nlohmann::json summary = nlohmann::json::parse(read_file(dir / "summary.json"));
  CHECK(summary.at("final").at("k").get<long long>() == 250);
  CHECK(summary.at("config").at("game").get<std::string>() == "builtin:matching-pennies");
  CHECK(summary.at("config").at("seed").get<std::uint64_t>() == 3);
  CHECK(summary.at("bounds").at("D").get<double>() == doctest::Approx(4.0));

  const nlohmann::json manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  CHECK(manifest.at("artifacts").size() == 3);
  CHECK(manifest.at("status").get<std::string>() == "ok");
}

TEST_CASE("sweep validates the grid, sorts the rows, and matches the run summaries") {
  const fs::path dir = scratch("sweep");

  // A grid point violating the timescale assumption is rejected up front.
  const fs::path err = dir / "stderr.txt";
  CHECK(run_cli("sweep --game builtin:matching-pennies --rho-alpha-grid 0.5,0.6 --out " +
                    (dir / "bad").string(),
                {}, err) == 5);
  CHECK(read_file(err).find("1/2 < rho_alpha") != std::string::npos);

  const std::string common =
      "sweep --game builtin:random-zs --gen-states 2 --gen-seed 5 --dynamics ttfp-mf "
      "--horizon 300 --cadence 300 --seeds 1,0 --rho-alpha-grid 0.6,0.55 "
      "--rho-beta-grid 1.0,0.8 --out " +
      (dir / "grid").string();
  CHECK(run_cli(common) == 0);

  const std::string agg = read_file(dir / "grid" / "aggregate.csv");
  REQUIRE(line_count(agg) == 9);  // header + 2*2*2 rows

  std::istringstream lines(agg);
  std::string header, row;
  std::getline(lines, header);
  CHECK(header.rfind("rho_alpha,rho_beta,seed,", 0) == 0);
  std::string prev;
  int rows = 0;
  while (std::getline(lines, row)) {
    if (!prev.empty()) CHECK(prev < row);  // sorted by grid point then seed
    prev = row;
    ++rows;
    if (rows == 1) {
      // First row is (0.55, 0.8, seed 0); it must replay that run's summary.
      CHECK(row.rfind("0.55,0.8,0,", 0) == 0);
      const nlohmann::json summary = nlohmann::json::parse(
          read_file(dir / "grid" / "ra0.55_rb0.8_seed0" / "summary.json"));
      std::istringstream cells(row);
      std::string cell;
      for (int i = 0; i < 4; ++i) std::getline(cells, cell, ',');
      CHECK(std::stod(cell) == summary.at("final").at("nash_gap").get<double>());
    }
  }
  CHECK(rows == 8);
}

TEST_CASE("commands leave their input files untouched") {
  const fs::path dir = scratch("inputs");
  GeneratorSpec spec;
  spec.states = 2;
  const StochasticGame game = generate_game(spec, 3);
  const fs::path game_file = dir / "game.json";
  save_game_file(game, game_file);
  const std::string before = read_file(game_file);

  CHECK(run_cli("run --game " + game_file.string() + " --dynamics q-learning --horizon 100 "
                "--out " + (dir / "out").string()) == 0);
  CHECK(read_file(game_file) == before);
}
