// SPDX-License-Identifier: Apache-2.0

#include "wsn/topology.hpp"

#include <algorithm>
#include <cmath>

#include "wsn/error.hpp"
#include "wsn/parallel.hpp"
#include "wsn/random.hpp"

namespace wsn::topology {

namespace {

void require_positive(double v, const char* field)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw Error(ErrorCode::InvariantViolation, "value must be strictly positive", field, std::to_string(v));
}

std::vector<Vec3> positions_of(std::span<const Sensor> sensors)
{
    std::vector<Vec3> out;
    out.reserve(sensors.size());
    for (const auto& s : sensors)
        out.push_back(s.position);
    return out;
}

} // namespace

void validate(const WeightModel& weights)
{
    require_positive(weights.kit_mass, "weights.kit_mass_kg");
    require_positive(weights.hub_mass, "weights.hub_mass_kg");
    require_positive(weights.cable_mass_per_meter, "weights.cable_mass_kg_per_m");
}

void validate(const SweepRange& range)
{
    if (range.n_rf_min < 2)
        throw Error(ErrorCode::InvariantViolation, "n_rf_min must be at least 2", "sweep.n_rf_min",
                    std::to_string(range.n_rf_min));
    if (range.n_rf_max && *range.n_rf_max < range.n_rf_min)
        throw Error(ErrorCode::InvariantViolation, "n_rf range is empty", "sweep.n_rf_max",
                    std::to_string(*range.n_rf_max));
    if (range.n_hub_min < 1)
        throw Error(ErrorCode::InvariantViolation, "n_hub_min must be at least 1", "sweep.n_hub_min",
                    std::to_string(range.n_hub_min));
    if (range.n_hub_max < range.n_hub_min)
        throw Error(ErrorCode::InvariantViolation, "n_hub range is empty", "sweep.n_hub_max",
                    std::to_string(range.n_hub_max));
    if (range.restarts < 1)
        throw Error(ErrorCode::InvariantViolation, "restarts must be at least 1", "sweep.restarts", "0");
}

KitPlacement place_rf_kits(std::span<const Vec3> sensors, std::size_t n_rf, std::size_t restarts,
                           std::uint64_t seed, clustering::MedianKind median)
{
    if (n_rf < 2)
        throw Error(ErrorCode::InvalidArgument, "at least two RF kits are required", "n_rf", std::to_string(n_rf));

    const auto result = clustering::kmeans(sensors, n_rf, restarts, seed);

    KitPlacement out;
    out.sensor_to_kit = result.labels;
    out.kits.reserve(n_rf);
    std::vector<Vec3> members;
    for (std::size_t c = 0; c < n_rf; ++c) {
        members.clear();
        for (std::size_t i = 0; i < sensors.size(); ++i)
            if (result.labels[i] == c)
                members.push_back(sensors[i]);
        out.kits.push_back(clustering::median(members, median));
    }
    return out;
}

HubPlacement place_hubs(std::span<const Vec3> kits, std::size_t n_hub, std::size_t restarts, std::uint64_t seed)
{
    if (n_hub < 1)
        throw Error(ErrorCode::InvalidArgument, "at least one HUB is required", "n_hub", std::to_string(n_hub));
    if (n_hub >= kits.size())
        throw Error(ErrorCode::HubCountNotBelowKits, "HUB count must be below the kit count", "n_hub",
                    std::to_string(n_hub));

    const auto result = clustering::kmeans(kits, n_hub, restarts, seed);
    // k-means centroids are the arithmetic means of the members already.
    return {result.centroids, result.labels};
}

std::size_t SegmentTopology::live_hub_count() const
{
    return static_cast<std::size_t>(std::count(hub_dropped.begin(), hub_dropped.end(), false));
}

std::size_t SegmentTopology::wired_kit_count() const
{
    return static_cast<std::size_t>(
        std::count_if(kit_to_hub.begin(), kit_to_hub.end(), [](const auto& h) { return !h.has_value(); }));
}

bool SegmentTopology::backbone_unmodeled() const { return wired_kit_count() > 0 && !backbone; }

SegmentTopology assemble_topology(std::string segment_id, std::span<const Sensor> sensors, KitPlacement kits,
                                  HubPlacement hubs, std::optional<Vec3> backbone)
{
    SegmentTopology t;
    t.segment_id = std::move(segment_id);
    for (const auto& s : sensors) {
        t.sensor_ids.push_back(s.id);
        t.sensor_positions.push_back(s.position);
    }
    t.n_rf = kits.kits.size();
    t.n_hub = hubs.hubs.size();
    t.kit_positions = std::move(kits.kits);
    t.sensor_to_kit = std::move(kits.sensor_to_kit);
    t.hub_positions = std::move(hubs.hubs);
    t.kit_to_hub.assign(hubs.kit_to_hub.begin(), hubs.kit_to_hub.end());
    t.hub_dropped.assign(t.n_hub, false);
    t.backbone = backbone;
    return t;
}

double cable_length(const SegmentTopology& t)
{
    double length = 0.0;
    for (std::size_t i = 0; i < t.sensor_positions.size(); ++i)
        length += distance(t.sensor_positions[i], t.kit_positions[t.sensor_to_kit[i]]);
    if (t.backbone)
        for (std::size_t k = 0; k < t.kit_positions.size(); ++k)
            if (!t.kit_to_hub[k])
                length += distance(t.kit_positions[k], *t.backbone);
    return length;
}

double evaluate_mass(const SegmentTopology& t, const WeightModel& w)
{
    return static_cast<double>(t.kit_positions.size()) * w.kit_mass +
           static_cast<double>(t.live_hub_count()) * w.hub_mass + w.cable_mass_per_meter * cable_length(t);
}

SegmentTopology apply_hub_drop(SegmentTopology t, const WeightModel& weights)
{
    std::vector<std::size_t> served(t.hub_positions.size(), 0);
    for (const auto& h : t.kit_to_hub)
        if (h)
            ++served[*h];
    for (std::size_t h = 0; h < served.size(); ++h) {
        if (served[h] != 1 || t.hub_dropped[h])
            continue;
        t.hub_dropped[h] = true;
        for (auto& link : t.kit_to_hub)
            if (link == h)
                link.reset();
    }
    t.total_mass = evaluate_mass(t, weights);
    return t;
}

std::uint64_t kit_stage_seed(std::uint64_t seed, std::size_t n_rf) noexcept
{
    return derive_seed(seed, {0, n_rf});
}

std::uint64_t hub_stage_seed(std::uint64_t seed, std::size_t n_rf, std::size_t n_hub) noexcept
{
    return derive_seed(seed, {1, n_rf, n_hub});
}

SweepResult sweep_segment(std::string segment_id, std::span<const Sensor> sensors, const SweepRange& range,
                          const WeightModel& weights, const SweepOptions& options)
{
    validate(range);
    const std::size_t n_s = sensors.size();
    if (n_s < 2)
        throw Error(ErrorCode::TooFewSensors, "a segment needs at least two sensors", "segment", segment_id);

    const std::size_t rf_lo = range.n_rf_min;
    const std::size_t rf_hi = std::min(range.n_rf_max.value_or(n_s), n_s);
    const auto positions = positions_of(sensors);

    struct PerKitCount {
        std::vector<SweepCandidate> log;
        std::vector<SegmentTopology> topologies;
        std::size_t runs = 0;
    };
    const std::size_t rf_count = rf_hi >= rf_lo ? rf_hi - rf_lo + 1 : 0;
    std::vector<PerKitCount> slots(rf_count);

    parallel_for(rf_count, options.jobs, [&](std::size_t slot) {
        const std::size_t n_rf = rf_lo + slot;
        auto& out = slots[slot];
        const auto kits = place_rf_kits(positions, n_rf, range.restarts, kit_stage_seed(range.seed, n_rf),
                                        options.median);
        ++out.runs;
        for (std::size_t n_hub = range.n_hub_min; n_hub <= range.n_hub_max && n_hub < n_rf; ++n_hub) {
            auto hubs = place_hubs(kits.kits, n_hub, range.restarts, hub_stage_seed(range.seed, n_rf, n_hub));
            ++out.runs;
            auto t = apply_hub_drop(assemble_topology(segment_id, sensors, kits, std::move(hubs), options.backbone),
                                    weights);
            const std::size_t dropped = t.n_hub - t.live_hub_count();
            out.log.push_back({n_rf, n_hub, t.total_mass, dropped});
            out.topologies.push_back(std::move(t));
        }
    });

    SweepResult result;
    result.closed_form_runs = rf_count * (range.n_hub_max - range.n_hub_min + 2);
    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (std::size_t s = 0; s < slots.size(); ++s) {
        result.clustering_runs += slots[s].runs;
        for (std::size_t c = 0; c < slots[s].log.size(); ++c) {
            result.log.push_back(slots[s].log[c]);
            if (!best || slots[s].log[c].mass < slots[best->first].log[best->second].mass)
                best = {s, c};
        }
    }
    if (!best)
        throw Error(ErrorCode::InvariantViolation, "sweep range admits no (n_rf, n_hub) candidate", "segment",
                    segment_id);

    result.best = slots[best->first].topologies[best->second];
    if (options.keep_candidates)
        for (auto& s : slots)
            for (auto& t : s.topologies)
                result.candidates.push_back(std::move(t));
    return result;
}

} // namespace wsn::topology
