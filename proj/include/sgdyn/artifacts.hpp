#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "sgdyn/simulate.hpp"

namespace sgdyn {

// Shortest decimal that round-trips to the same double; integers print bare.
std::string format_double(double x);

// Writes through a sibling temp file and renames, so readers never observe
// a partial file. Throws IoError.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

// Header: k,state,a1,a2,r1,r2
std::string trace_csv(const ExperimentTrace& trace);

// Header: k,metric,player,state,value. Game-level metrics carry player -1;
// run-level bound constants carry state -1 as well. Metrics a pair cannot
// support are omitted, never written as zero.
std::string snapshot_csv(const ExperimentTrace& trace);

// Final metrics, bound constants, and realized returns. Keys are sorted, so
// serialization is deterministic.
nlohmann::json summary_json(const ExperimentTrace& trace);

}  // namespace sgdyn
