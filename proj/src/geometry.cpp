// SPDX-License-Identifier: Apache-2.0

#include "wsn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/core.h>

#include "wsn/error.hpp"
#include "wsn/units.hpp"

namespace wsn::geometry {

namespace {

std::string num(double v) { return fmt::format("{}", v); }

} // namespace

LauncherProfile build_profile(std::vector<ControlPoint> control_points, std::optional<Cap> cap)
{
    if (control_points.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "profile needs at least two control points", "control_points",
                    std::to_string(control_points.size()));

    for (std::size_t i = 0; i < control_points.size(); ++i) {
        const auto& p = control_points[i];
        const std::string field = "control_points[" + std::to_string(i) + "]";
        if (!(p.radius > 0.0) || !std::isfinite(p.radius))
            throw Error(ErrorCode::NonPositiveRadius, "radius must be positive", field + ".radius", num(p.radius));
        if (!std::isfinite(p.x))
            throw Error(ErrorCode::NonMonotonicAxis, "axial coordinate is not finite", field + ".x", num(p.x));
        if (i > 0 && !(p.x > control_points[i - 1].x))
            throw Error(ErrorCode::NonMonotonicAxis, "axial coordinates must be strictly increasing", field + ".x",
                        num(p.x));
    }

    if (cap) {
        const auto& last = control_points.back();
        if (!(cap->apex_x > last.x))
            throw Error(ErrorCode::NonMonotonicAxis, "cap apex must lie beyond the last control point", "cap.apex_x",
                        num(cap->apex_x));
        const double tol = 1e-9 * std::max(1.0, last.radius);
        if (std::abs(cap->base_radius - last.radius) > tol)
            throw Error(ErrorCode::CapMismatch, "cap base radius differs from the last control radius",
                        "cap.base_radius", num(cap->base_radius));
    }

    LauncherProfile profile;
    profile.points_ = std::move(control_points);
    profile.cap_ = cap;
    return profile;
}

double radius_at(const LauncherProfile& profile, double x)
{
    const auto& pts = profile.control_points();
    if (!(x >= profile.x_begin() && x <= profile.x_end()))
        throw Error(ErrorCode::OutOfDomain, "axial coordinate outside the launcher profile", "x", num(x));

    if (x > pts.back().x) {
        // radius(x) = r_b * sqrt(1 - (x - x_b) / (x_apex - x_b))
        const auto& cap = *profile.cap();
        const double t = (x - pts.back().x) / (cap.apex_x - pts.back().x);
        return cap.base_radius * std::sqrt(std::max(0.0, 1.0 - t));
    }

    auto hi = std::lower_bound(pts.begin(), pts.end(), x,
                               [](const ControlPoint& p, double v) { return p.x < v; });
    if (hi->x == x)
        return hi->radius;
    auto lo = std::prev(hi);
    const double t = (x - lo->x) / (hi->x - lo->x);
    return lo->radius + t * (hi->radius - lo->radius);
}

std::vector<ControlPoint> profile_slice(const LauncherProfile& profile, double lo, double hi, int cap_samples)
{
    lo = std::max(lo, profile.x_begin());
    hi = std::min(hi, profile.x_end());
    std::vector<ControlPoint> out;
    if (lo > hi)
        return out;

    out.push_back({lo, radius_at(profile, lo)});
    for (const auto& p : profile.control_points())
        if (p.x > lo && p.x < hi)
            out.push_back(p);

    if (profile.cap()) {
        const double base = profile.control_points().back().x;
        const double apex = profile.cap()->apex_x;
        for (int i = 1; i < cap_samples; ++i) {
            const double x = base + (apex - base) * i / cap_samples;
            if (x > lo && x < hi)
                out.push_back({x, radius_at(profile, x)});
        }
    }
    if (hi > lo)
        out.push_back({hi, radius_at(profile, hi)});
    return out;
}

double FrequencyPlan::wavelength() const noexcept { return units::speed_of_light / center; }

void validate(const FrequencyPlan& plan)
{
    if (!(plan.band_low > 0.0))
        throw Error(ErrorCode::InvariantViolation, "band must be positive", "frequency.band_low_mhz",
                    num(units::hz_to_mhz(plan.band_low)));
    if (!(plan.band_low < plan.band_high))
        throw Error(ErrorCode::InvariantViolation, "band_low must be below band_high", "frequency.band_high_mhz",
                    num(units::hz_to_mhz(plan.band_high)));
    if (!(plan.center > plan.band_low && plan.center < plan.band_high))
        throw Error(ErrorCode::InvariantViolation, "center frequency outside the band", "frequency.center_mhz",
                    num(units::hz_to_mhz(plan.center)));
}

SegmentBounds segment_bounds(std::span<const double> device_x, double wavelength, std::string segment_id)
{
    if (device_x.empty())
        throw Error(ErrorCode::EmptyDeviceList, "segment has no devices", "segment", segment_id);
    if (!(wavelength > 0.0))
        throw Error(ErrorCode::InvalidArgument, "wavelength must be positive", "wavelength", num(wavelength));

    const auto [lo, hi] = std::minmax_element(device_x.begin(), device_x.end());
    SegmentBounds b;
    b.segment_id = std::move(segment_id);
    b.x_min = *lo;
    b.x_max = *hi;
    b.x_lo_margin = b.x_min - kMarginWavelengths * wavelength;
    b.x_hi_margin = b.x_max + kMarginWavelengths * wavelength;
    return b;
}

std::vector<SegmentMembers> partition_stages(std::span<const StagedPoint> points,
                                             std::span<const StageDefinition> stages)
{
    std::map<std::string, std::size_t> stage_index;
    for (std::size_t i = 0; i < stages.size(); ++i)
        stage_index.emplace(stages[i].label, i);

    // Two slots per stage: lower ("a" or whole) and upper ("b").
    std::vector<std::vector<std::size_t>> slots(2 * stages.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto it = stage_index.find(points[i].stage);
        if (it == stage_index.end())
            throw Error(ErrorCode::UnknownStageLabel, "sensor references an undeclared stage",
                        "sensors[" + std::to_string(i) + "].stage", points[i].stage);
        const auto& stage = stages[it->second];
        const bool upper = stage.split && points[i].x > stage.midpoint();
        slots[2 * it->second + (upper ? 1 : 0)].push_back(i);
    }

    std::vector<SegmentMembers> out;
    for (std::size_t s = 0; s < stages.size(); ++s) {
        const auto& stage = stages[s];
        if (stage.split) {
            if (!slots[2 * s].empty())
                out.push_back({stage.label + "a", std::move(slots[2 * s])});
            if (!slots[2 * s + 1].empty())
                out.push_back({stage.label + "b", std::move(slots[2 * s + 1])});
        } else if (!slots[2 * s].empty()) {
            out.push_back({stage.label, std::move(slots[2 * s])});
        }
    }
    return out;
}

} // namespace wsn::geometry
