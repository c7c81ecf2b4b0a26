// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

namespace wsn::units {

inline constexpr double speed_of_light = 299'792'458.0; // m/s
inline constexpr double mm_per_m = 1000.0;

constexpr double mm_to_m(double mm) noexcept { return mm / mm_per_m; }
constexpr double m_to_mm(double m) noexcept { return m * mm_per_m; }

constexpr double mhz_to_hz(double mhz) noexcept { return mhz * 1e6; }
constexpr double hz_to_mhz(double hz) noexcept { return hz / 1e6; }

inline double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double ratio) noexcept { return 10.0 * std::log10(ratio); }

inline double dbm_to_watts(double dbm) noexcept { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) noexcept { return 10.0 * std::log10(watts) + 30.0; }

inline double dbm_to_milliwatts(double dbm) noexcept { return std::pow(10.0, dbm / 10.0); }
inline double milliwatts_to_dbm(double mw) noexcept { return 10.0 * std::log10(mw); }

} // namespace wsn::units
