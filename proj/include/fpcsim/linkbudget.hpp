// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

namespace fpcsim {

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

constexpr double kThermalNoiseDbmPerHz = -174.0;

/// Thermal noise power over the given bandwidth plus receiver noise figure.
inline double noise_power_dbm(double bandwidth_hz, double noise_figure_db) {
  return kThermalNoiseDbmPerHz + 10.0 * std::log10(bandwidth_hz) +
         noise_figure_db;
}

inline double noise_power_mw(double bandwidth_hz, double noise_figure_db) {
  return dbm_to_mw(noise_power_dbm(bandwidth_hz, noise_figure_db));
}

}  // namespace fpcsim
