// SPDX-License-Identifier: Apache-2.0

#include "fpcsim/channel.hpp"

#include <algorithm>
#include <cmath>

namespace fpcsim {

LinkState large_scale(const LinkGeometry& geom, const UserTerminal& user,
                      const ArrayGeometry& array, const ChannelProfile& profile,
                      double bs_height_m, RngStream& los_rng,
                      RngStream& shadow_rng, ClampCounter* clamps) {
  LinkState state;
  state.los = los_rng.bernoulli(los_probability(geom.d2d, user.ue_height_m));
  state.pathloss_db =
      pathloss_uma_db(geom.d2d, geom.d3d, state.los, profile.fc_ghz,
                      bs_height_m, user.ue_height_m, clamps);
  const double sigma = state.los ? profile.shadow_sigma_los_db
                                 : profile.shadow_sigma_nlos_db;
  state.shadowing_db = shadow_rng.normal(0.0, sigma);
  state.o2i_db = user.indoor ? o2i_loss_db(user.d2d_indoor_m) : 0.0;
  state.element_gain_db = element_gain_db(geom.azimuth_aod_deg,
                                          geom.zenith_aod_deg - 90.0, array);
  state.attenuation_db = state.pathloss_db + state.shadowing_db + state.o2i_db -
                         state.element_gain_db;
  return state;
}

ClusterState draw_clusters(bool los, const LinkGeometry& geom,
                           const ChannelProfile& profile, RngStream& rng) {
  const int n = los ? profile.clusters_los : profile.clusters_nlos;
  ClusterState cs;
  cs.power.resize(n);
  cs.delay_s.resize(n);
  cs.azimuth_deg.resize(n);
  cs.zenith_deg.resize(n);
  cs.pol_v.resize(n);
  cs.pol_h.resize(n);

  const double ds = profile.delay_spread_ns * 1e-9;
  const double xpr_amp = std::pow(10.0, -profile.xpr_db / 20.0);
  for (int c = 0; c < n; ++c) {
    const bool direct = los && c == 0;
    cs.delay_s(c) = (direct || ds <= 0.0) ? 0.0 : rng.exponential(ds);
    cs.azimuth_deg(c) =
        geom.azimuth_aod_deg +
        (direct ? 0.0 : rng.laplacian(profile.azimuth_spread_deg));
    cs.zenith_deg(c) = std::clamp(
        geom.zenith_aod_deg +
            (direct ? 0.0 : rng.laplacian(profile.zenith_spread_deg)),
        0.0, 180.0);
    cs.power(c) = ds > 0.0 ? std::exp(-cs.delay_s(c) / ds) : 1.0;
    cs.pol_v(c) = rng.unit_phase();
    cs.pol_h(c) = xpr_amp * rng.unit_phase();
  }
  cs.power /= cs.power.sum();
  return cs;
}

Eigen::MatrixXcd cluster_port_response(const ClusterState& clusters,
                                       const ArrayGeometry& array,
                                       double attenuation_db) {
  const int n = clusters.clusters();
  const double amp = std::pow(10.0, -attenuation_db / 20.0);

  Eigen::MatrixXcd response(array.ports, n);
  for (int c = 0; c < n; ++c) {
    // per dual-pol pair |g+|^2 + |g-|^2 == 2 exactly, so the per-port mean
    // square response is one
    const double pol_norm = 1.0 / std::sqrt(1.0 + std::norm(clusters.pol_h(c)));
    const std::complex<double> g_plus =
        (clusters.pol_v(c) + clusters.pol_h(c)) * pol_norm;
    const std::complex<double> g_minus =
        (clusters.pol_v(c) - clusters.pol_h(c)) * pol_norm;
    const double w = amp * std::sqrt(clusters.power(c));
    for (int m = 0; m < array.ports; ++m) {
      const std::complex<double> pol =
          (array.port_pol(m) == 0) ? g_plus : g_minus;
      response(m, c) = w * pol *
                       steering_phase(array, m, clusters.azimuth_deg(c),
                                      clusters.zenith_deg(c));
    }
  }
  return response;
}

Eigen::VectorXcd delay_phasors(const Eigen::ArrayXd& delay_s, double f_offset_hz) {
  const Eigen::ArrayXd phase = -2.0 * M_PI * f_offset_hz * delay_s;
  Eigen::VectorXcd d(delay_s.size());
  d.real() = phase.cos();
  d.imag() = phase.sin();
  return d;
}

Eigen::MatrixXcd small_scale_all_rbs(const Eigen::MatrixXcd& response,
                                     const Eigen::ArrayXd& delay_s,
                                     const ChannelProfile& profile) {
  Eigen::MatrixXcd phasors(delay_s.size(), profile.rb_count);
  for (int n = 0; n < profile.rb_count; ++n) {
    phasors.col(n) = delay_phasors(delay_s, profile.rb_offset_hz(n));
  }
  return response * phasors;
}

}  // namespace fpcsim
