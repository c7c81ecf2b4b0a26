// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsn/geometry.hpp"
#include "wsn/topology.hpp"
#include "wsn/vec3.hpp"

namespace wsn::propagation {

// Generalized Friis law: P_rx/P_tx = g_tx * g_rx / l0 * (d0 / D)^gamma.
// Gains and loss are linear power ratios. With l0 unset the free-space
// reference loss (4*pi*d0/lambda)^2 is used.
struct FriisParams {
    double g_tx = 1.5848931924611136; // 2 dBi
    double g_rx = 1.5848931924611136; // 2 dBi
    std::optional<double> l0;        // nullopt: free-space loss at d0
    double d0 = 1.0;                 // m, also the near-field guard
    double gamma = 2.0;
};

// Throws InvariantViolation on non-positive gains, loss or d0, or gamma < 1.
void validate(const FriisParams& params);

double reference_loss(const FriisParams& params, double wavelength);

// Throws DistanceBelowReference for distance < d0, InvalidArgument for a
// non-positive wavelength.
double friis_gain(const FriisParams& params, double distance, double wavelength);

struct MultipathConfig {
    std::size_t max_reflection_order = 2;
    std::complex<double> wall_reflection_coefficient{-1.0, 0.0}; // PEC
};

void validate(const MultipathConfig& config);

// Coherent sum of the direct ray and its images in two walls parallel to the
// launcher axis at y = +local_radius and y = -local_radius. Each ray carries
// amplitude sqrt(friis_gain(length)), phase 2*pi*length/lambda and one
// reflection coefficient per bounce. Returns |sum|^2.
// Throws CoincidentDevices when tx == rx.
double image_source_gain(const Vec3& tx, const Vec3& rx, double local_radius, double wavelength,
                         const MultipathConfig& config, const FriisParams& friis);

enum class Model { Friis, ImageSource, Imported };

std::string to_string(Model model);
Model model_from_string(const std::string& name);

// Symmetric matrix of linear power gains between the wireless devices of a
// segment. Diagonal entries are 1 by convention.
struct LinkGainMatrix {
    std::string segment_id;
    std::vector<std::string> device_ids;
    std::vector<double> gains; // row-major, size n*n
    double frequency = 0.0;    // Hz
    std::vector<std::string> warnings;

    std::size_t size() const noexcept { return device_ids.size(); }
    double at(std::size_t i, std::size_t j) const { return gains[i * size() + j]; }
    double& at(std::size_t i, std::size_t j) { return gains[i * size() + j]; }
    std::optional<std::size_t> index_of(const std::string& id) const;
};

// Identifiers of the wireless devices of a topology: "kit-<k>" for every kit
// still linked to a HUB, then "hub-<h>" for every live HUB.
std::vector<std::string> wireless_device_ids(const topology::SegmentTopology& topology);
std::vector<Vec3> wireless_device_positions(const topology::SegmentTopology& topology);

struct ModelInputs {
    Model model = Model::Friis;
    FriisParams friis;
    MultipathConfig multipath;
    const geometry::LauncherProfile* profile = nullptr; // required by ImageSource
};

// Pairwise gains at the plan's center frequency; fills i<j and mirrors.
// Fewer than two wireless devices give an empty matrix.
LinkGainMatrix assemble_matrix(const topology::SegmentTopology& topology, const geometry::FrequencyPlan& plan,
                               const ModelInputs& inputs);

// Exchange file: comma-separated, the corner cell names the unit ("dB" or
// "linear"), the first row and first column carry device ids.
void write_matrix(const LinkGainMatrix& matrix, const std::filesystem::path& path);

// Parses and validates an exchange file. When `expected_ids` is given the
// file must carry exactly those devices; rows/columns are reordered to match.
// Asymmetric entries are replaced by their mean, with a warning if the
// relative asymmetry exceeds 1e-6.
// Throws ShapeMismatch, UnknownDeviceId, NonPositiveGain, FileNotFound.
LinkGainMatrix import_matrix(const std::filesystem::path& path,
                             std::optional<std::span<const std::string>> expected_ids = std::nullopt);

// Project description for an external full-wave solver: the segment's
// envelope between the margins, PEC boundary open at the bottom and closed at
// the top, one x-oriented infinitesimal dipole per wireless device and the
// analysis frequency. JSON text.
std::string cem_project_json(const geometry::SegmentBounds& bounds, const geometry::LauncherProfile& profile,
                             const topology::SegmentTopology& topology, const geometry::FrequencyPlan& plan);

void export_cem_project(const geometry::SegmentBounds& bounds, const geometry::LauncherProfile& profile,
                        const topology::SegmentTopology& topology, const geometry::FrequencyPlan& plan,
                        const std::filesystem::path& path);

} // namespace wsn::propagation
