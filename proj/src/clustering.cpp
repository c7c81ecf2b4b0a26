// SPDX-License-Identifier: Apache-2.0

#include "wsn/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "wsn/error.hpp"
#include "wsn/random.hpp"

namespace wsn::clustering {

namespace {

std::size_t nearest(const Vec3& p, std::span<const Vec3> centroids)
{
    std::size_t best = 0;
    double best_d = squared_distance(p, centroids[0]);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double d = squared_distance(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

void update_centroids(std::span<const Vec3> points, std::span<const std::size_t> labels, std::vector<Vec3>& centroids)
{
    std::vector<Vec3> sums(centroids.size());
    std::vector<std::size_t> counts(centroids.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        sums[labels[i]] += points[i];
        ++counts[labels[i]];
    }
    for (std::size_t c = 0; c < centroids.size(); ++c)
        if (counts[c] > 0)
            centroids[c] = sums[c] * (1.0 / static_cast<double>(counts[c]));
}

// Moves the farthest point of a multi-member cluster into each empty one.
void reseed_empty(std::span<const Vec3> points, std::vector<std::size_t>& labels, std::vector<Vec3>& centroids)
{
    std::vector<std::size_t> counts(centroids.size(), 0);
    for (auto l : labels)
        ++counts[l];

    for (std::size_t c = 0; c < centroids.size(); ++c) {
        if (counts[c] != 0)
            continue;
        std::size_t far = points.size();
        double far_d = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (counts[labels[i]] < 2)
                continue;
            const double d = squared_distance(points[i], centroids[labels[i]]);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        --counts[labels[far]];
        labels[far] = c;
        counts[c] = 1;
        centroids[c] = points[far];
    }
}

void canonicalize(Clustering& result)
{
    const std::size_t k = result.centroids.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return result.centroids[a] < result.centroids[b]; });
    std::vector<std::size_t> relabel(k);
    std::vector<Vec3> sorted(k);
    for (std::size_t i = 0; i < k; ++i) {
        relabel[order[i]] = i;
        sorted[i] = result.centroids[order[i]];
    }
    result.centroids = std::move(sorted);
    for (auto& l : result.labels)
        l = relabel[l];
}

} // namespace

std::uint64_t restart_seed(std::uint64_t seed, std::size_t index) noexcept
{
    return derive_seed(seed, {static_cast<std::uint64_t>(index)});
}

double inertia(std::span<const Vec3> points, std::span<const std::size_t> labels, std::span<const Vec3> centroids)
{
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        total += squared_distance(points[i], centroids[labels[i]]);
    return total;
}

Clustering kmeans_run(std::span<const Vec3> points, std::size_t k, std::uint64_t run_seed, const KMeansOptions& options)
{
    const std::size_t n = points.size();
    if (k == 0)
        throw Error(ErrorCode::InvalidArgument, "k must be at least 1", "k", "0");
    if (k > n)
        throw Error(ErrorCode::KExceedsPoints, "more clusters than points", "k", std::to_string(k));

    // Partial Fisher-Yates: first k entries become the initial centers.
    Rng rng(run_seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i)
        std::swap(idx[i], idx[i + uniform_index(rng, n - i)]);

    Clustering out;
    out.centroids.resize(k);
    for (std::size_t c = 0; c < k; ++c)
        out.centroids[c] = points[idx[c]];
    out.labels.assign(n, 0);

    std::vector<std::size_t> previous;
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        for (std::size_t i = 0; i < n; ++i)
            out.labels[i] = nearest(points[i], out.centroids);
        if (iter > 0 && out.labels == previous)
            break;
        reseed_empty(points, out.labels, out.centroids);
        update_centroids(points, out.labels, out.centroids);
        out.inertia = inertia(points, out.labels, out.centroids);
        out.inertia_trace.push_back(out.inertia);
        previous = out.labels;
    }
    if (out.inertia_trace.empty())
        out.inertia = inertia(points, out.labels, out.centroids);
    return out;
}

Clustering kmeans(std::span<const Vec3> points, std::size_t k, std::size_t restarts, std::uint64_t seed,
                  const KMeansOptions& options)
{
    if (restarts == 0)
        throw Error(ErrorCode::InvalidArgument, "at least one restart is required", "restarts", "0");

    Clustering best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < restarts; ++r) {
        Clustering run = kmeans_run(points, k, restart_seed(seed, r), options);
        if (run.inertia < best.inertia) {
            run.restart = r;
            best = std::move(run);
        }
    }
    canonicalize(best);
    return best;
}

Vec3 centroid(std::span<const Vec3> points)
{
    Vec3 sum;
    for (const auto& p : points)
        sum += p;
    return sum * (1.0 / static_cast<double>(points.size()));
}

double sum_of_distances(std::span<const Vec3> points, const Vec3& at)
{
    double total = 0.0;
    for (const auto& p : points)
        total += distance(p, at);
    return total;
}

Vec3 geometric_median(std::span<const Vec3> points, const MedianOptions& options)
{
    if (points.empty())
        throw Error(ErrorCode::InvalidArgument, "median of an empty point set", "points", "0");

    constexpr double coincident = 1e-14;

    // Resultant of unit vectors from `at` toward every point not coincident
    // with it, and the number of coincident points.
    auto pull = [&](const Vec3& at, double& weight) {
        Vec3 r;
        weight = 0.0;
        for (const auto& q : points) {
            const double d = distance(q, at);
            if (d <= coincident)
                weight += 1.0;
            else
                r += (q - at) * (1.0 / d);
        }
        return r;
    };

    // A data point is the minimizer iff |pull| <= its multiplicity; only the
    // strict case is taken here so ties (e.g. two points) fall through to the
    // iteration, which settles on the symmetric solution.
    for (const auto& p : points) {
        double w = 0.0;
        const Vec3 r = pull(p, w);
        if (norm(r) < w - 1e-12)
            return p;
    }

    Vec3 y = centroid(points);
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        Vec3 num;
        double den = 0.0;
        double weight = 0.0;
        for (const auto& q : points) {
            const double d = distance(q, y);
            if (d <= coincident) {
                weight += 1.0;
                continue;
            }
            num += q * (1.0 / d);
            den += 1.0 / d;
        }
        if (den == 0.0)
            return y;
        Vec3 next = num * (1.0 / den);
        if (weight > 0.0) {
            double w = 0.0;
            const double r = norm(pull(y, w));
            if (r <= w)
                return y;
            const double blend = w / r;
            next = next * (1.0 - blend) + y * blend;
        }
        const double step = distance(next, y);
        y = next;
        if (step < options.tolerance)
            break;
    }
    return y;
}

Vec3 coordinate_median(std::span<const Vec3> points)
{
    if (points.empty())
        throw Error(ErrorCode::InvalidArgument, "median of an empty point set", "points", "0");
    auto median_of = [&](double Vec3::*axis) {
        std::vector<double> v;
        v.reserve(points.size());
        for (const auto& p : points)
            v.push_back(p.*axis);
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    return {median_of(&Vec3::x), median_of(&Vec3::y), median_of(&Vec3::z)};
}

Vec3 median(std::span<const Vec3> points, MedianKind kind)
{
    return kind == MedianKind::Geometric ? geometric_median(points) : coordinate_median(points);
}

} // namespace wsn::clustering
