// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cmath>
#include <complex>

#include "fpcsim/errors.hpp"

namespace fpcsim {

/// BS uniform planar array. Ports are laid out as `rows` element rows by
/// columns() column positions; in dual-polarized mode each position carries
/// a +45 and a -45 degree port, in single-polarized mode one port. Port
/// index maps to (row, column, polarization) via port_row/port_col/port_pol.
struct ArrayGeometry {
  int ports = 128;
  int rows = 4;
  bool dual_pol = true;
  double element_spacing_wl = 0.5;
  double downtilt_deg = 12.0;
  double element_gain_dbi = 8.0;
  double hpbw_deg = 65.0;
  double fbr_db = 30.0;

  int ports_per_position() const { return dual_pol ? 2 : 1; }
  int columns() const { return ports / (rows * ports_per_position()); }

  void validate() const {
    const int per_col = rows * ports_per_position();
    if (ports <= 0 || ports % per_col != 0) {
      throw ConfigError("array.ports must be a positive multiple of " +
                        std::to_string(per_col));
    }
  }

  int port_row(int m) const { return (m / ports_per_position()) % rows; }
  int port_col(int m) const { return m / (ports_per_position() * rows); }
  int port_pol(int m) const { return dual_pol ? (m % 2) : 0; }
};

/// Parabolic element pattern: gain = g_max - min(A_az + A_zen, fbr) with
/// A(x) = min(12 (x / hpbw)^2, fbr) per plane. Offsets are relative to the
/// element boresight, downtilt already applied.
inline double element_gain_db(double az_off_deg, double zen_off_deg,
                              const ArrayGeometry& array) {
  const auto plane = [&](double off) {
    const double a = 12.0 * (off / array.hpbw_deg) * (off / array.hpbw_deg);
    return std::min(a, array.fbr_db);
  };
  const double att = std::min(plane(az_off_deg) + plane(zen_off_deg), array.fbr_db);
  return array.element_gain_dbi - att;
}

/// Phase-only steering response of port m for a plane wave departing at
/// (azimuth, zenith) in the tilted sector frame. Columns run along the
/// horizontal cross-boresight axis, rows along the array vertical.
inline std::complex<double> steering_phase(const ArrayGeometry& array, int m,
                                           double azimuth_deg,
                                           double zenith_deg) {
  const double az = azimuth_deg * M_PI / 180.0;
  const double zen = zenith_deg * M_PI / 180.0;
  const double phase = 2.0 * M_PI * array.element_spacing_wl *
                       (array.port_col(m) * std::sin(zen) * std::sin(az) +
                        array.port_row(m) * std::cos(zen));
  return {std::cos(phase), std::sin(phase)};
}

/// Full steering vector over all ports (no polarization weighting).
inline Eigen::VectorXcd steering_vector(const ArrayGeometry& array,
                                        double azimuth_deg, double zenith_deg) {
  Eigen::VectorXcd a(array.ports);
  for (int m = 0; m < array.ports; ++m) {
    a(m) = steering_phase(array, m, azimuth_deg, zenith_deg);
  }
  return a;
}

}  // namespace fpcsim
