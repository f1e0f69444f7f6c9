// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "fpcsim/errors.hpp"

namespace fpcsim {

enum class PowerControlMode { no_pc, fpc };

/// Open-loop uplink power control settings. L is a positive attenuation in
/// dB throughout, so raising alpha raises the transmit power of weak users.
struct PowerControlConfig {
  PowerControlMode mode = PowerControlMode::fpc;
  double p0_dbm = -60.0;
  double alpha = 0.5;
  double p_max_dbm = 23.0;
  int rb_count = 50;

  void validate() const {
    if (alpha < 0.0 || alpha > 1.0) {
      throw ConfigError("pc.alpha must be in [0, 1]");
    }
    if (rb_count < 1) throw ConfigError("sys.rb_count must be >= 1");
  }

  static PowerControlConfig no_pc_preset(int rb_count) {
    PowerControlConfig cfg;
    cfg.mode = PowerControlMode::no_pc;
    cfg.rb_count = rb_count;
    return cfg;
  }
  static PowerControlConfig fpc05_preset(int rb_count) {
    return {PowerControlMode::fpc, -60.0, 0.5, 23.0, rb_count};
  }
  static PowerControlConfig fpc08_preset(int rb_count) {
    return {PowerControlMode::fpc, -100.0, 0.8, 23.0, rb_count};
  }
};

/// Pilot transmit power of one user in dBm:
/// min(p_max, P0 + 10 log10(N) + alpha * L). In no-PC mode every user
/// transmits at p_max.
inline double fpc_power_dbm(const PowerControlConfig& cfg, double attenuation_db) {
  if (cfg.mode == PowerControlMode::no_pc) return cfg.p_max_dbm;
  const double target =
      cfg.p0_dbm + 10.0 * std::log10(static_cast<double>(cfg.rb_count)) +
      cfg.alpha * attenuation_db;
  return std::min(cfg.p_max_dbm, target);
}

struct PowerPlan {
  Eigen::VectorXd power_dbm;        // per user
  Eigen::VectorXd rb_power_mw;      // per user, per-RB linear power
  double fraction_at_max = 0.0;

  int users() const { return static_cast<int>(power_dbm.size()); }
};

/// Vectorized power law over the per-user anchor attenuations. Also
/// reports the fraction of users transmitting exactly at p_max.
inline PowerPlan plan_powers(const PowerControlConfig& cfg,
                             const Eigen::VectorXd& anchor_attenuation_db) {
  cfg.validate();
  PowerPlan plan;
  const int n = static_cast<int>(anchor_attenuation_db.size());
  plan.power_dbm.resize(n);
  plan.rb_power_mw.resize(n);
  int at_max = 0;
  for (int k = 0; k < n; ++k) {
    const double p = fpc_power_dbm(cfg, anchor_attenuation_db(k));
    plan.power_dbm(k) = p;
    plan.rb_power_mw(k) = std::pow(10.0, p / 10.0) / cfg.rb_count;
    if (p == cfg.p_max_dbm) ++at_max;
  }
  plan.fraction_at_max = n > 0 ? static_cast<double>(at_max) / n : 0.0;
  return plan;
}

}  // namespace fpcsim
