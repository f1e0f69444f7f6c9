// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>

namespace fpcsim {

/// Counts links whose 2D distance fell outside the pathloss model validity
/// range and was clamped. Reported per drop; never fatal.
struct ClampCounter {
  std::uint64_t below_min = 0;
  std::uint64_t above_max = 0;
  std::uint64_t total() const { return below_min + above_max; }
};

/// Urban-macro LOS probability as a function of 2D distance and UE height.
/// Equals 1 inside 18 m, decays with distance, and carries the high-UE
/// enhancement term for heights above 13 m. Clamped to [0, 1].
double los_probability(double d2d_m, double ue_height_m);

/// Urban-macro pathloss in dB at carrier fc_ghz. The NLOS value is the max
/// of the LOS curve and the NLOS formula. Distances outside [10 m, 5 km]
/// are clamped and counted.
double pathloss_uma_db(double d2d_m, double d3d_m, bool los, double fc_ghz,
                       double bs_height_m, double ue_height_m,
                       ClampCounter* clamps = nullptr);

/// Low-loss building penetration: composite wall loss plus depth loss.
inline double o2i_loss_db(double d2d_indoor_m) {
  return 20.0 + 0.5 * d2d_indoor_m;
}

}  // namespace fpcsim
