// SPDX-License-Identifier: Apache-2.0

#include "fpcsim/training.hpp"

#include <cmath>

#include "fpcsim/errors.hpp"

namespace fpcsim {

PilotPlan allocate_pilots(const NetworkLayout& layout,
                          const std::vector<int>& anchors, PilotReuse reuse,
                          int per_sector) {
  PilotPlan plan;
  plan.reuse = reuse;
  plan.tau = reuse == PilotReuse::r1 ? 1 : 3;
  plan.sector_color.resize(layout.sectors());
  for (int s = 0; s < layout.sectors(); ++s) {
    plan.sector_color[s] = reuse == PilotReuse::r1 ? 0 : layout.sector_in_site(s);
  }
  plan.pilot_index.assign(anchors.size(), -1);
  std::vector<int> next_index(layout.sectors(), 0);
  for (std::size_t u = 0; u < anchors.size(); ++u) {
    const int sector = anchors[u];
    plan.pilot_index[u] = next_index[sector]++;
    if (plan.pilot_index[u] >= per_sector) {
      throw ConfigError("sector " + std::to_string(sector) +
                        " holds more users than pilots");
    }
  }
  return plan;
}

std::vector<int> contaminators(const PilotPlan& plan,
                               const std::vector<int>& anchors, int user) {
  const int sector = anchors[user];
  const int color = plan.sector_color[sector];
  const int pilot = plan.pilot_index[user];
  std::vector<int> out;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (static_cast<int>(i) == user) continue;
    if (anchors[i] == sector) continue;
    if (plan.sector_color[anchors[i]] != color) continue;
    if (plan.pilot_index[i] != pilot) continue;
    out.push_back(static_cast<int>(i));
  }
  return out;
}

Eigen::VectorXcd ls_estimate(const Eigen::VectorXcd& desired,
                             double desired_rb_power_mw,
                             const Eigen::MatrixXcd& interferers,
                             const Eigen::VectorXd& interferer_rb_power_mw,
                             const Eigen::VectorXcd& noise) {
  if (desired_rb_power_mw <= 0.0) {
    throw ConfigError("pilot power must be positive for LS estimation");
  }
  Eigen::VectorXcd estimate = desired;
  for (int i = 0; i < interferers.cols(); ++i) {
    estimate += std::sqrt(interferer_rb_power_mw(i) / desired_rb_power_mw) *
                interferers.col(i);
  }
  estimate += noise / std::sqrt(desired_rb_power_mw);
  return estimate;
}

double estimation_sinr_db(double desired_rb_power_mw, double desired_sum_norm2,
                          const Eigen::VectorXd& interferer_rb_power_mw,
                          const Eigen::VectorXd& interferer_sum_norm2,
                          int rb_count, int ports, double noise_variance_mw) {
  const double signal = desired_rb_power_mw * desired_sum_norm2;
  double denom = static_cast<double>(rb_count) * ports * noise_variance_mw;
  for (int i = 0; i < interferer_rb_power_mw.size(); ++i) {
    denom += interferer_rb_power_mw(i) * interferer_sum_norm2(i);
  }
  return 10.0 * std::log10(signal / denom);
}

}  // namespace fpcsim
