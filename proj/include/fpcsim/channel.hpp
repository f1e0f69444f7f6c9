// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <complex>

#include "fpcsim/antenna.hpp"
#include "fpcsim/geometry.hpp"
#include "fpcsim/pathloss.hpp"
#include "fpcsim/rng.hpp"

namespace fpcsim {

/// Reduced clustered channel profile. Clusters carry an exponential delay
/// profile, Laplacian angle offsets around the geometric link direction and
/// a random dual-polarization response with fixed XPR.
struct ChannelProfile {
  double fc_ghz = 2.0;
  double rb_bandwidth_hz = 180e3;
  int rb_count = 50;
  int clusters_nlos = 12;
  int clusters_los = 8;
  double azimuth_spread_deg = 10.0;
  double zenith_spread_deg = 5.0;
  double delay_spread_ns = 300.0;
  double xpr_db = 8.0;
  double shadow_sigma_los_db = 4.0;
  double shadow_sigma_nlos_db = 6.0;

  /// Center-frequency offset of RB n from the band center.
  double rb_offset_hz(int n) const {
    return (n - 0.5 * (rb_count - 1)) * rb_bandwidth_hz;
  }
};

/// Large-scale state of one (user, sector) link. attenuation_db is the L
/// value entering the power-control law: pathloss + shadowing + O2I minus
/// the element gain at the link angles.
struct LinkState {
  bool los = false;
  double pathloss_db = 0.0;
  double shadowing_db = 0.0;
  double o2i_db = 0.0;
  double element_gain_db = 0.0;
  double attenuation_db = 0.0;
};

/// Assembles the large-scale link state. The LOS flag is drawn from
/// los_rng (one draw), shadowing from shadow_rng (one draw), so the caller
/// can key LOS per site and shadowing per sector.
LinkState large_scale(const LinkGeometry& geom, const UserTerminal& user,
                      const ArrayGeometry& array, const ChannelProfile& profile,
                      double bs_height_m, RngStream& los_rng,
                      RngStream& shadow_rng, ClampCounter* clamps = nullptr);

/// Per-link cluster realization, drawn once per drop. Powers sum to one
/// exactly; in LOS the first cluster sits on the geometric direction with
/// zero excess delay.
struct ClusterState {
  Eigen::ArrayXd power;
  Eigen::ArrayXd delay_s;
  Eigen::ArrayXd azimuth_deg;
  Eigen::ArrayXd zenith_deg;
  Eigen::ArrayXcd pol_v;  // unit-modulus ray phase, vertical component
  Eigen::ArrayXcd pol_h;  // cross component, amplitude 10^(-xpr/20)

  int clusters() const { return static_cast<int>(power.size()); }
};

ClusterState draw_clusters(bool los, const LinkGeometry& geom,
                           const ChannelProfile& profile, RngStream& rng);

/// Per-port, per-cluster complex response including sqrt(cluster power),
/// polarization mixing, UPA steering and the large-scale amplitude
/// sqrt(10^(-L/10)). The channel on RB n is this matrix times the delay
/// phasor vector, so E[||h||^2] = ports * 10^(-L/10).
Eigen::MatrixXcd cluster_port_response(const ClusterState& clusters,
                                       const ArrayGeometry& array,
                                       double attenuation_db);

/// Delay phasors exp(-i 2 pi f tau_c) at frequency offset f.
Eigen::VectorXcd delay_phasors(const Eigen::ArrayXd& delay_s, double f_offset_hz);

/// Channel vector on one RB: response * phasors.
inline Eigen::VectorXcd small_scale(const Eigen::MatrixXcd& response,
                                    const Eigen::ArrayXd& delay_s,
                                    double f_offset_hz) {
  return response * delay_phasors(delay_s, f_offset_hz);
}

/// Channel across all RBs at once (ports x rb_count).
Eigen::MatrixXcd small_scale_all_rbs(const Eigen::MatrixXcd& response,
                                     const Eigen::ArrayXd& delay_s,
                                     const ChannelProfile& profile);

}  // namespace fpcsim
