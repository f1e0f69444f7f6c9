// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <vector>

#include "fpcsim/rng.hpp"

namespace fpcsim {

using Vec2 = Eigen::Vector2d;

/// Hexagonal multi-site deployment with wraparound.
///
/// Sites live on a hexagonal lattice with basis u = (isd, 0) and
/// v = (isd/2, isd*sqrt(3)/2). The wraparound displacement set holds the
/// zero vector plus the six shortest translations of the cluster
/// super-lattice, so every cluster copy is disjoint and congruent.
struct NetworkLayout {
  std::vector<Vec2> site_positions;
  std::vector<double> sector_orientations_deg;  // 3 per site: 0/120/240
  double inter_site_distance = 500.0;
  double bs_height = 25.0;
  std::vector<Vec2> wrap_displacements;

  int sites() const { return static_cast<int>(site_positions.size()); }
  int sectors() const { return 3 * sites(); }
  int site_of_sector(int sector) const { return sector / 3; }
  int sector_in_site(int sector) const { return sector % 3; }
};

/// Builds the standard cluster for 1, 7 (one ring) or 19 (two rings) sites.
/// Unsupported site counts raise ConfigError. For a single site the
/// displacement set degenerates to {0} (no wraparound copies).
NetworkLayout build_layout(int sites, double isd_m, double bs_height_m = 25.0);

struct UserTerminal {
  Vec2 position;        // x, y in m
  bool indoor = false;
  int floor = 1;        // 1-based; 1 for outdoor users
  double d2d_indoor_m = 0.0;
  double ue_height_m = 1.5;
  int anchor_sector = -1;
};

/// Draws one user uniformly over the coverage area (union of the per-site
/// hexagonal cells) with indoor flag, building height, floor and
/// penetration depth.
UserTerminal draw_user(const NetworkLayout& layout, RngStream& rng);

/// Drops per_sector * sectors users uniformly over the wrapped coverage
/// area (the union of the per-site hexagonal cells). Indoor flag, building
/// height, floor and penetration depth are drawn per user. Deterministic
/// given the stream.
std::vector<UserTerminal> drop_users(const NetworkLayout& layout, int per_sector,
                                     RngStream& rng);

/// Per (user, sector) wrapped link geometry. Angles are in the sector frame
/// after mechanical downtilt: azimuth relative to the sector boresight,
/// zenith measured from vertical with the boresight at 90 degrees.
struct LinkGeometry {
  double d2d = 0.0;
  double d3d = 0.0;
  double azimuth_aod_deg = 0.0;
  double zenith_aod_deg = 90.0;
  int chosen_wrap = 0;
};

/// Reduces a position modulo the wraparound lattice to the representative
/// nearest the cluster origin. Wrapped link distances are invariant under
/// lattice translations of the input.
Vec2 wrap_position(const NetworkLayout& layout, const Vec2& position);

LinkGeometry link_geometry(const NetworkLayout& layout, int sector,
                           const Vec2& user_position, double ue_height_m,
                           double downtilt_deg);

/// Anchor selection for one user: the admissible sector with the smallest
/// attenuation (ties to the lowest sector id). Sectors already holding
/// k_cap users are skipped; returns -1 if every sector is full.
int associate(const Eigen::VectorXd& attenuation_db,
              const std::vector<int>& sector_load, int k_cap);

/// Anchors every user in index order with a per-sector cap. Returns one
/// anchor id per user, or an empty vector if the fill is infeasible.
std::vector<int> associate_all(const Eigen::MatrixXd& attenuation_db, int k_cap);

}  // namespace fpcsim
