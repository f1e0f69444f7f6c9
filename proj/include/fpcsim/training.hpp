// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <vector>

#include "fpcsim/geometry.hpp"

namespace fpcsim {

enum class PilotReuse { r1, r3 };
enum class CsiMode { estimated, pcsi };

constexpr int kSubframeSymbols = 14;  // T

// De-spreading the pilot coherently accumulates the 12 subcarriers of an
// RB (the channel is flat within one RB), so the effective estimation
// noise variance is the per-RB thermal power divided by 12.
constexpr int kSubcarriersPerRb = 12000000;

/// Pilot allocation. Reuse 1 spends one OFDM symbol and shares the pilot
/// set across all sectors; reuse 3 spends three symbols and keeps the
/// sectors of a site mutually orthogonal via per-sector colors.
struct PilotPlan {
  PilotReuse reuse = PilotReuse::r3;
  int tau = 3;
  std::vector<int> pilot_index;  // per user, in [0, K)
  std::vector<int> sector_color; // per sector; constant under reuse 1

  double overhead() const {
    return static_cast<double>(tau) / kSubframeSymbols;
  }
  double data_fraction() const {
    return static_cast<double>(kSubframeSymbols - tau) / kSubframeSymbols;
  }
};

/// Assigns pilot indices 0..K-1 within each anchor sector in user-index
/// order and colors sectors (sector index within site under reuse 3).
PilotPlan allocate_pilots(const NetworkLayout& layout,
                          const std::vector<int>& anchors, PilotReuse reuse,
                          int per_sector);

/// Users whose pilot collides with `user` at its anchor BS: same pilot
/// index, same sector color, different sector.
std::vector<int> contaminators(const PilotPlan& plan,
                               const std::vector<int>& anchors, int user);

/// Least-squares channel estimate on one RB after de-spreading a unit-norm
/// pilot: the true channel plus amplitude-weighted contaminator channels
/// plus scaled noise. `interferers` holds one contaminator channel per
/// column; `noise` is a pre-drawn CN(0, sigma^2 I) vector.
Eigen::VectorXcd ls_estimate(const Eigen::VectorXcd& desired,
                             double desired_rb_power_mw,
                             const Eigen::MatrixXcd& interferers,
                             const Eigen::VectorXd& interferer_rb_power_mw,
                             const Eigen::VectorXcd& noise);

/// Wideband channel estimation SINR in dB: pilot-weighted desired energy
/// over contamination energy plus noise, aggregated over all RBs.
/// `sum_norm2` terms are sums of squared channel norms over the RBs.
double estimation_sinr_db(double desired_rb_power_mw, double desired_sum_norm2,
                          const Eigen::VectorXd& interferer_rb_power_mw,
                          const Eigen::VectorXd& interferer_sum_norm2,
                          int rb_count, int ports, double noise_variance_mw);

}  // namespace fpcsim
