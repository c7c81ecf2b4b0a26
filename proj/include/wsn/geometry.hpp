// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsn/vec3.hpp"

namespace wsn::geometry {

struct ControlPoint {
    double x = 0.0;      // m
    double radius = 0.0; // m
};

// Paraboloid closure at the top of the vehicle. It attaches at the last
// control point and shrinks to zero radius at `apex_x`.
struct Cap {
    double apex_x = 0.0;      // m
    double base_radius = 0.0; // m
};

// Axisymmetric launcher envelope: piecewise-linear radius along x, optionally
// closed by a paraboloid cap.
class LauncherProfile {
public:
    const std::vector<ControlPoint>& control_points() const noexcept { return points_; }
    const std::optional<Cap>& cap() const noexcept { return cap_; }

    double x_begin() const noexcept { return points_.front().x; }
    double x_end() const noexcept { return cap_ ? cap_->apex_x : points_.back().x; }

private:
    friend LauncherProfile build_profile(std::vector<ControlPoint>, std::optional<Cap>);

    std::vector<ControlPoint> points_;
    std::optional<Cap> cap_;
};

// Throws NonMonotonicAxis, NonPositiveRadius or CapMismatch.
LauncherProfile build_profile(std::vector<ControlPoint> control_points, std::optional<Cap> cap = std::nullopt);

// Radius of the envelope at axial coordinate x. Throws OutOfDomain outside
// [x_begin, x_end].
double radius_at(const LauncherProfile& profile, double x);

// Control points restricted to [lo, hi] (clamped to the profile domain), with
// interpolated end points. Cap samples are included when the window reaches
// into the cap.
std::vector<ControlPoint> profile_slice(const LauncherProfile& profile, double lo, double hi,
                                        int cap_samples = 8);

struct FrequencyPlan {
    double band_low = 750e6;  // Hz
    double band_high = 950e6; // Hz
    double center = 850e6;    // Hz

    double wavelength() const noexcept;
};

// Throws InvariantViolation unless band_low < center < band_high.
void validate(const FrequencyPlan& plan);

// Number of wavelengths beyond the outermost devices after which the
// surface currents are taken as vanished.
inline constexpr double kMarginWavelengths = 10.0;

struct SegmentBounds {
    std::string segment_id;
    double x_min = 0.0;
    double x_max = 0.0;
    double x_lo_margin = 0.0;
    double x_hi_margin = 0.0;
};

// Throws EmptyDeviceList, InvalidArgument for non-positive wavelength.
SegmentBounds segment_bounds(std::span<const double> device_x, double wavelength, std::string segment_id);

struct StageDefinition {
    std::string label;
    double x_lo = 0.0; // m
    double x_hi = 0.0; // m
    bool split = false;

    double midpoint() const noexcept { return 0.5 * (x_lo + x_hi); }
};

struct StagedPoint {
    std::string stage;
    double x = 0.0;
};

struct SegmentMembers {
    std::string segment_id;
    std::vector<std::size_t> members; // indices into the input list
};

// Assigns every point to one segment. Split stages produce "<label>a" (x at
// or below the stage midpoint) and "<label>b". Segments follow the order of
// `stages`; segments without members are omitted. Throws UnknownStageLabel.
std::vector<SegmentMembers> partition_stages(std::span<const StagedPoint> points,
                                             std::span<const StageDefinition> stages);

} // namespace wsn::geometry
