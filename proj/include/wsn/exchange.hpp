// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "wsn/clustering.hpp"
#include "wsn/geometry.hpp"
#include "wsn/power.hpp"
#include "wsn/propagation.hpp"
#include "wsn/topology.hpp"

namespace wsn::exchange {

struct DesignConfig {
    topology::WeightModel weights;
    power::RfDeviceSpec rf;
    geometry::FrequencyPlan frequency;
    propagation::FriisParams friis;
    propagation::MultipathConfig multipath;
    topology::SweepRange sweep;
    propagation::Model model = propagation::Model::Friis;
    clustering::MedianKind median = clustering::MedianKind::Geometric;
    power::PeerScope peer_scope = power::PeerScope::Links;
    std::map<std::string, Vec3> backbone_points; // per segment id, meters
};

// Cross-field and per-component invariants. Throws InvariantViolation.
void validate(const DesignConfig& config);

// Parses a JSON config; absent keys keep their defaults and an empty file
// yields the defaults. Unknown keys and wrong types raise SchemaViolation,
// broken invariants InvariantViolation; both carry the field path.
DesignConfig parse_config(std::string_view text);
DesignConfig load_config(const std::filesystem::path& path);

// Full config with every field spelled out; parse_config accepts it back.
nlohmann::ordered_json config_to_json(const DesignConfig& config);

// CSV with header id,x_mm,y_mm,z_mm,stage (any column order). Coordinates
// are converted to meters. Throws FileNotFound, MissingColumn, DuplicateId,
// NonNumericCoordinate.
std::vector<topology::Sensor> load_sensors(const std::filesystem::path& path);
void write_sensors(const std::vector<topology::Sensor>& sensors, const std::filesystem::path& path);

struct GeometryInput {
    geometry::LauncherProfile profile;
    std::vector<geometry::StageDefinition> stages;
};

// Record-per-line text:
//   point,<x_mm>,<radius_mm>
//   cap,<apex_x_mm>,<base_radius_mm>
//   stage,<label>,<x_lo_mm>,<x_hi_mm>,<split: 0|1>
GeometryInput load_geometry(const std::filesystem::path& path);

// Everything the workflow produces for one segment. Optional parts are filled
// by the later stages.
struct SegmentReport {
    topology::SegmentTopology topology;
    std::vector<topology::SweepCandidate> sweep_log;
    std::size_t clustering_runs = 0;
    std::size_t closed_form_runs = 0;
    std::optional<geometry::SegmentBounds> bounds;
    std::optional<propagation::LinkGainMatrix> gains;
    std::string gains_provenance; // "friis", "image" or "import:<file>"
    std::optional<power::PowerBudget> budget;
    std::vector<power::Diagnostic> diagnostics;
};

struct RunReport {
    DesignConfig config;
    std::uint64_t seed = 0;
    std::vector<SegmentReport> segments;
    std::vector<std::string> warnings;
    std::optional<double> total_dbm;

    bool feasible() const;
};

// Stage artifacts.
void write_sweep_log(const SegmentReport& segment, const std::filesystem::path& path);
void write_topology_artifact(const RunReport& report, const std::filesystem::path& path);
RunReport read_topology_artifact(const std::filesystem::path& path);

// Per-segment hub and kit tables, budget.csv, summary.csv and report.json.
// With no segments only summary.csv and report.json are written.
void write_report(const RunReport& report, const std::filesystem::path& out_dir);

std::string hub_table_csv(const SegmentReport& segment);
std::string kit_table_csv(const SegmentReport& segment);
std::string summary_csv(const RunReport& report);

} // namespace wsn::exchange
