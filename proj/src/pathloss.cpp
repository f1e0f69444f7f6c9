// SPDX-License-Identifier: Apache-2.0

#include "fpcsim/pathloss.hpp"

#include <algorithm>
#include <cmath>

namespace fpcsim {

double los_probability(double d2d_m, double ue_height_m) {
  if (d2d_m <= 18.0) return 1.0;
  const double base =
      18.0 / d2d_m + std::exp(-d2d_m / 63.0) * (1.0 - 18.0 / d2d_m);
  double c = 0.0;
  if (ue_height_m > 13.0) {
    const double h = std::min(ue_height_m, 23.0);
    c = std::pow((h - 13.0) / 10.0, 1.5);
  }
  const double enhancement =
      1.0 + c * 1.25 * std::pow(d2d_m / 100.0, 3.0) * std::exp(-d2d_m / 150.0);
  return std::clamp(base * enhancement, 0.0, 1.0);
}

double pathloss_uma_db(double d2d_m, double d3d_m, bool los, double fc_ghz,
                       double bs_height_m, double ue_height_m,
                       ClampCounter* clamps) {
  double d2d = d2d_m;
  if (d2d < 10.0) {
    d2d = 10.0;
    if (clamps) ++clamps->below_min;
  } else if (d2d > 5000.0) {
    d2d = 5000.0;
    if (clamps) ++clamps->above_max;
  }
  const double dz = bs_height_m - ue_height_m;
  const double d3d = (d2d == d2d_m) ? d3d_m : std::hypot(d2d, dz);

  // breakpoint with 1 m effective environment height
  const double h_bs_eff = bs_height_m - 1.0;
  const double h_ue_eff = ue_height_m - 1.0;
  const double d_bp = 4.0 * h_bs_eff * h_ue_eff * fc_ghz * 1e9 / 3e8;

  double pl_los;
  if (d2d <= d_bp) {
    pl_los = 28.0 + 22.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz);
  } else {
    pl_los = 28.0 + 40.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz) -
             9.0 * std::log10(d_bp * d_bp + dz * dz);
  }
  if (los) return pl_los;

  const double pl_nlos = 13.54 + 39.08 * std::log10(d3d) +
                         20.0 * std::log10(fc_ghz) -
                         0.6 * (ue_height_m - 1.5);
  return std::max(pl_los, pl_nlos);
}

}  // namespace fpcsim
