// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsn/clustering.hpp"
#include "wsn/vec3.hpp"

namespace wsn::topology {

struct Sensor {
    std::string id;
    Vec3 position; // m
    std::string stage;
};

// Unit masses of the network hardware and of the wiring.
struct WeightModel {
    double kit_mass = 1.280;             // kg per sensor RF kit
    double hub_mass = 1.880;             // kg per HUB
    double cable_mass_per_meter = 0.014; // kg/m
};

// Throws InvariantViolation unless every field is strictly positive.
void validate(const WeightModel& weights);

struct SweepRange {
    std::size_t n_rf_min = 2;
    std::optional<std::size_t> n_rf_max; // defaults to the sensor count
    std::size_t n_hub_min = 1;
    std::size_t n_hub_max = 3;
    std::size_t restarts = 1000;
    std::uint64_t seed = 1;
};

// Throws InvariantViolation on n_rf_min < 2, n_hub_min < 1, empty ranges or
// zero restarts.
void validate(const SweepRange& range);

struct KitPlacement {
    std::vector<Vec3> kits;
    std::vector<std::size_t> sensor_to_kit;
};

// Clusters the sensors into n_rf groups and puts each kit at the median of
// its group. Throws InvalidArgument for n_rf < 2, KExceedsPoints for
// n_rf > |sensors|.
KitPlacement place_rf_kits(std::span<const Vec3> sensors, std::size_t n_rf, std::size_t restarts,
                           std::uint64_t seed, clustering::MedianKind median = clustering::MedianKind::Geometric);

struct HubPlacement {
    std::vector<Vec3> hubs;
    std::vector<std::size_t> kit_to_hub;
};

// Clusters the kits into n_hub groups and puts each HUB at its group
// centroid. Throws HubCountNotBelowKits unless n_hub < |kits|.
HubPlacement place_hubs(std::span<const Vec3> kits, std::size_t n_hub, std::size_t restarts, std::uint64_t seed);

struct SegmentTopology {
    std::string segment_id;
    std::vector<std::string> sensor_ids;
    std::vector<Vec3> sensor_positions;
    std::vector<Vec3> kit_positions;
    std::vector<Vec3> hub_positions; // every HUB of the clustering, dropped ones included
    std::vector<std::size_t> sensor_to_kit;
    std::vector<std::optional<std::size_t>> kit_to_hub; // nullopt: kit is cabled
    std::vector<bool> hub_dropped;
    std::optional<Vec3> backbone; // attachment point for cabled kits
    double total_mass = 0.0;      // kg
    std::size_t n_rf = 0;
    std::size_t n_hub = 0; // before HUB drop

    std::size_t live_hub_count() const;
    std::size_t wired_kit_count() const;
    // True when some kit is cabled but no backbone point is known, so its
    // backbone cable is counted as zero.
    bool backbone_unmodeled() const;
};

SegmentTopology assemble_topology(std::string segment_id, std::span<const Sensor> sensors, KitPlacement kits,
                                  HubPlacement hubs, std::optional<Vec3> backbone = std::nullopt);

// Removes every HUB serving exactly one kit; that kit becomes cabled.
// total_mass is recomputed with `weights`.
SegmentTopology apply_hub_drop(SegmentTopology topology, const WeightModel& weights);

// kits*kit_mass + live HUBs*hub_mass + cable_mass_per_meter*(sensor-to-kit
// distances + cabled-kit backbone distances). Straight-line cable lengths.
double evaluate_mass(const SegmentTopology& topology, const WeightModel& weights);

double cable_length(const SegmentTopology& topology);

struct SweepCandidate {
    std::size_t n_rf = 0;
    std::size_t n_hub = 0;
    double mass = 0.0;
    std::size_t dropped_hubs = 0;
};

struct SweepOptions {
    clustering::MedianKind median = clustering::MedianKind::Geometric;
    std::optional<Vec3> backbone;
    std::size_t jobs = 1;
    bool keep_candidates = false;
};

struct SweepResult {
    SegmentTopology best;
    std::vector<SweepCandidate> log; // ordered by (n_rf, n_hub)
    std::vector<SegmentTopology> candidates; // parallel to log when keep_candidates
    std::size_t clustering_runs = 0;   // k-means invocations actually performed
    std::size_t closed_form_runs = 0;  // (#n_rf values) * (#n_hub values + 1)
};

// Seeds for the sensor clustering at n_rf and the kit clustering at
// (n_rf, n_hub), derived from the sweep seed.
std::uint64_t kit_stage_seed(std::uint64_t seed, std::size_t n_rf) noexcept;
std::uint64_t hub_stage_seed(std::uint64_t seed, std::size_t n_rf, std::size_t n_hub) noexcept;

// Enumerates all (n_rf, n_hub) in range with n_hub < n_rf <= N_s and returns
// the minimal-mass topology; ties go to smaller n_rf, then smaller n_hub.
// Throws TooFewSensors when N_s < 2.
SweepResult sweep_segment(std::string segment_id, std::span<const Sensor> sensors, const SweepRange& range,
                          const WeightModel& weights, const SweepOptions& options = {});

} // namespace wsn::topology
