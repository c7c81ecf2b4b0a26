// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wsn/vec3.hpp"

namespace wsn::clustering {

struct Clustering {
    std::vector<std::size_t> labels; // cluster index per point
    std::vector<Vec3> centroids;     // sorted lexicographically
    double inertia = 0.0;            // sum of squared distances to the assigned centroid
    std::vector<double> inertia_trace; // per Lloyd iteration of the selected run
    std::size_t restart = 0;         // index of the selected run
};

struct KMeansOptions {
    std::size_t max_iterations = 300;
};

// Seed used by restart `index` of a kmeans() call with base seed `seed`.
std::uint64_t restart_seed(std::uint64_t seed, std::size_t index) noexcept;

// One Lloyd run from `k` distinct randomly chosen points. A cluster that goes
// empty is re-seeded with the point farthest from its current centroid.
Clustering kmeans_run(std::span<const Vec3> points, std::size_t k, std::uint64_t run_seed,
                      const KMeansOptions& options = {});

// Best-inertia clustering over `restarts` runs; ties keep the earliest run.
// Throws KExceedsPoints when k > |points| and InvalidArgument for k == 0 or
// restarts == 0.
Clustering kmeans(std::span<const Vec3> points, std::size_t k, std::size_t restarts, std::uint64_t seed,
                  const KMeansOptions& options = {});

double inertia(std::span<const Vec3> points, std::span<const std::size_t> labels, std::span<const Vec3> centroids);

enum class MedianKind { Geometric, Coordinate };

struct MedianOptions {
    double tolerance = 1e-9; // m, on the Weiszfeld step length
    std::size_t max_iterations = 1000;
};

// Point minimizing the sum of Euclidean distances (Weiszfeld iteration with
// the Vardi-Zhang correction at data points). An input point is returned
// exactly when it is strictly optimal; otherwise iteration starts from the
// centroid, so two points yield their midpoint.
Vec3 geometric_median(std::span<const Vec3> points, const MedianOptions& options = {});

// Component-wise median (mean of the two middle values for even counts).
Vec3 coordinate_median(std::span<const Vec3> points);

Vec3 median(std::span<const Vec3> points, MedianKind kind);

Vec3 centroid(std::span<const Vec3> points);

double sum_of_distances(std::span<const Vec3> points, const Vec3& at);

} // namespace wsn::clustering
