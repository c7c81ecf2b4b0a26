// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace wsn {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t v) noexcept
{
    v += 0x9e3779b97f4a7c15ULL;
    v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
    v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
    return v ^ (v >> 31);
}

// Folds a path of indices (candidate, restart, ...) into a base seed so every
// unit of work owns an independent stream regardless of execution order.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t s = mix64(base);
    for (auto p : path)
        s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

using Rng = std::mt19937_64;

// Uniform integer in [0, bound). std::uniform_int_distribution is
// implementation-defined, so draws are done by hand to keep results
// identical across standard libraries.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound)
{
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % bound;
}

} // namespace wsn
