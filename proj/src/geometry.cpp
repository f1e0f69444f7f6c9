// SPDX-License-Identifier: Apache-2.0

#include "fpcsim/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "fpcsim/errors.hpp"

namespace fpcsim {

namespace {

// Axial lattice coordinates: position = a*u + b*v.
struct Axial {
  int a;
  int b;
};

Vec2 axial_to_xy(const Axial& c, double isd) {
  const Vec2 u(isd, 0.0);
  const Vec2 v(isd * 0.5, isd * std::sqrt(3.0) / 2.0);
  return c.a * u + c.b * v;
}

std::vector<Axial> cluster_sites(int sites) {
  if (sites == 1) return {{0, 0}};
  const std::vector<Axial> ring1 = {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
  std::vector<Axial> out = {{0, 0}};
  out.insert(out.end(), ring1.begin(), ring1.end());
  if (sites == 7) return out;
  const std::vector<Axial> ring2 = {{1, 1},  {-1, 2}, {-2, 1}, {-1, -1}, {1, -2}, {2, -1},
                                    {2, 0},  {0, 2},  {-2, 2}, {-2, 0},  {0, -2}, {2, -2}};
  out.insert(out.end(), ring2.begin(), ring2.end());
  return out;
}

// Super-lattice generator for the cluster size: i^2 + i*j + j^2 = sites.
Axial wrap_generator(int sites) {
  if (sites == 7) return {2, 1};
  return {3, 2};  // 19
}

Axial rot60(const Axial& c) { return {-c.b, c.a + c.b}; }

}  // namespace

NetworkLayout build_layout(int sites, double isd_m, double bs_height_m) {
  if (sites != 1 && sites != 7 && sites != 19) {
    throw ConfigError("layout.sites must be 1, 7 or 19 (got " +
                      std::to_string(sites) + ")");
  }
  if (isd_m <= 0.0) {
    throw ConfigError("layout.isd_m must be positive");
  }
  NetworkLayout layout;
  layout.inter_site_distance = isd_m;
  layout.bs_height = bs_height_m;
  for (const auto& c : cluster_sites(sites)) {
    layout.site_positions.push_back(axial_to_xy(c, isd_m));
  }
  for (int s = 0; s < sites; ++s) {
    layout.sector_orientations_deg.push_back(0.0);
    layout.sector_orientations_deg.push_back(120.0);
    layout.sector_orientations_deg.push_back(240.0);
  }
  layout.wrap_displacements.push_back(Vec2::Zero());
  if (sites > 1) {
    const Axial c1 = wrap_generator(sites);
    const Axial c2 = rot60(c1);
    const Axial c3{c1.a - c2.a, c1.b - c2.b};
    for (const Axial& g : {c1, c2, c3}) {
      const Vec2 d = axial_to_xy(g, isd_m);
      layout.wrap_displacements.push_back(d);
      layout.wrap_displacements.push_back(-d);
    }
  }
  return layout;
}

Vec2 wrap_position(const NetworkLayout& layout, const Vec2& position) {
  if (layout.sites() == 1) return position;
  const Axial g1 = wrap_generator(layout.sites());
  const Axial g2 = rot60(g1);
  const Vec2 c1 = axial_to_xy(g1, layout.inter_site_distance);
  const Vec2 c2 = axial_to_xy(g2, layout.inter_site_distance);
  // lattice coordinates of the position, then local search around rounding
  Eigen::Matrix2d basis;
  basis.col(0) = c1;
  basis.col(1) = c2;
  const Vec2 frac = basis.inverse() * position;
  const double a0 = std::round(frac.x());
  const double b0 = std::round(frac.y());
  Vec2 best = position;
  double best_norm = std::numeric_limits<double>::infinity();
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      const Vec2 cand = position - (a0 + i) * c1 - (b0 + j) * c2;
      const double n = cand.squaredNorm();
      if (n < best_norm) {
        best_norm = n;
        best = cand;
      }
    }
  }
  return best;
}

UserTerminal draw_user(const NetworkLayout& layout, RngStream& rng) {
  const double isd = layout.inter_site_distance;
  // Voronoi hexagon of the site lattice: inradius isd/2, circumradius
  // isd/sqrt(3), flat sides facing the six neighbor directions.
  const double circum = isd / std::sqrt(3.0);
  const auto in_hexagon = [&](const Vec2& p) {
    for (int k = 0; k < 6; ++k) {
      const double ang = k * M_PI / 3.0;
      if (p.x() * std::cos(ang) + p.y() * std::sin(ang) > isd / 2.0 + 1e-12) {
        return false;
      }
    }
    return true;
  };

  UserTerminal ue;
  const auto site = static_cast<int>(rng.uniform_index(layout.sites()));
  Vec2 offset;
  do {
    offset = Vec2(rng.uniform(-circum, circum), rng.uniform(-circum, circum));
  } while (!in_hexagon(offset));
  ue.position = layout.site_positions[site] + offset;
  ue.indoor = rng.bernoulli(0.8);
  if (ue.indoor) {
    const int building_floors = 4 + static_cast<int>(rng.uniform_index(5));
    ue.floor = 1 + static_cast<int>(rng.uniform_index(building_floors));
    ue.d2d_indoor_m = rng.uniform(0.0, 25.0);
    ue.ue_height_m = 3.0 * (ue.floor - 1) + 1.5;
  } else {
    ue.floor = 1;
    ue.d2d_indoor_m = 0.0;
    ue.ue_height_m = 1.5;
  }
  return ue;
}

std::vector<UserTerminal> drop_users(const NetworkLayout& layout, int per_sector,
                                     RngStream& rng) {
  if (per_sector < 1) throw ConfigError("ue.per_sector must be >= 1");
  const int total = per_sector * layout.sectors();
  std::vector<UserTerminal> users;
  users.reserve(total);
  for (int i = 0; i < total; ++i) users.push_back(draw_user(layout, rng));
  return users;
}

LinkGeometry link_geometry(const NetworkLayout& layout, int sector,
                           const Vec2& user_position, double ue_height_m,
                           double downtilt_deg) {
  const Vec2 pos = wrap_position(layout, user_position);
  const Vec2 site = layout.site_positions[layout.site_of_sector(sector)];

  LinkGeometry geom;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < layout.wrap_displacements.size(); ++w) {
    const Vec2 d = pos - (site + layout.wrap_displacements[w]);
    const double n = d.squaredNorm();
    if (n < best) {
      best = n;
      geom.chosen_wrap = static_cast<int>(w);
    }
  }
  const Vec2 diff = pos - (site + layout.wrap_displacements[geom.chosen_wrap]);
  geom.d2d = diff.norm();
  const double dz = ue_height_m - layout.bs_height;
  geom.d3d = std::hypot(geom.d2d, dz);

  // direction from BS to UE, rotated into the downtilted sector frame
  const double inv = geom.d3d > 0.0 ? 1.0 / geom.d3d : 0.0;
  const Eigen::Vector3d e(diff.x() * inv, diff.y() * inv, dz * inv);
  const double phi0 = layout.sector_orientations_deg[sector] * M_PI / 180.0;
  const double xs = e.x() * std::cos(phi0) + e.y() * std::sin(phi0);
  const double ys = -e.x() * std::sin(phi0) + e.y() * std::cos(phi0);
  const double zs = e.z();
  const double tilt = downtilt_deg * M_PI / 180.0;
  const double xt = xs * std::cos(tilt) - zs * std::sin(tilt);
  const double zt = xs * std::sin(tilt) + zs * std::cos(tilt);

  geom.azimuth_aod_deg = std::atan2(ys, xt) * 180.0 / M_PI;
  geom.zenith_aod_deg = std::acos(std::clamp(zt, -1.0, 1.0)) * 180.0 / M_PI;
  return geom;
}

int associate(const Eigen::VectorXd& attenuation_db,
              const std::vector<int>& sector_load, int k_cap) {
  int best = -1;
  double best_l = std::numeric_limits<double>::infinity();
  for (int s = 0; s < attenuation_db.size(); ++s) {
    if (sector_load[s] >= k_cap) continue;
    if (attenuation_db(s) < best_l) {
      best_l = attenuation_db(s);
      best = s;
    }
  }
  return best;
}

std::vector<int> associate_all(const Eigen::MatrixXd& attenuation_db, int k_cap) {
  const int n_users = static_cast<int>(attenuation_db.rows());
  const int n_sectors = static_cast<int>(attenuation_db.cols());
  std::vector<int> anchors(n_users, -1);
  std::vector<int> load(n_sectors, 0);
  for (int u = 0; u < n_users; ++u) {
    const int s = associate(attenuation_db.row(u), load, k_cap);
    if (s < 0) return {};
    anchors[u] = s;
    ++load[s];
  }
  return anchors;
}

}  // namespace fpcsim
