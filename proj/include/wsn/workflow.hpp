// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wsn/exchange.hpp"

namespace wsn::workflow {

// Process exit statuses of the command-line tool.
enum class Exit : int { Success = 0, InputError = 1, Infeasible = 2 };

struct Options {
    std::filesystem::path geometry;
    std::filesystem::path sensors;
    std::optional<std::filesystem::path> config;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;            // overrides sweep.seed
    std::optional<propagation::Model> model;      // overrides config model
    std::optional<std::filesystem::path> import_gains; // directory of gains_<segment>.csv
    std::vector<std::string> segments;            // empty: all
    std::size_t jobs = 1;
    std::ostream* log = nullptr;
};

// Artifacts written to out_dir by each stage:
//   optimize: segments.csv, topology.json, sweep_<segment>.csv
//   gains:    gains_<segment>.csv, cem_<segment>.json, gains.json
//   budget:   hubs_<segment>.csv, kits_<segment>.csv, budget.csv,
//             summary.csv, report.json

// Seed used for one segment's sweep; independent of segment order.
std::uint64_t segment_seed(std::uint64_t seed, const std::string& segment_id) noexcept;

// Partitions the sensors into segments and writes segments.csv. Returns
// (segment id, sensors) pairs in stage order.
std::vector<std::pair<std::string, std::vector<topology::Sensor>>> run_segment(const Options& options);

exchange::RunReport run_optimize(const Options& options);

// Needs topology.json from optimize (MissingUpstreamArtifact otherwise).
exchange::RunReport run_gains(const Options& options);

// Needs topology.json and gains.json (MissingUpstreamArtifact otherwise).
exchange::RunReport run_budget(const Options& options);

// optimize -> gains -> budget through the on-disk artifacts.
exchange::RunReport run_pipeline(const Options& options);

Exit exit_status(const exchange::RunReport& report);

} // namespace wsn::workflow
