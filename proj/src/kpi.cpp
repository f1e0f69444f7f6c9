// SPDX-License-Identifier: Apache-2.0

#include "fpcsim/kpi.hpp"

#include <algorithm>
#include <cmath>

#include "fpcsim/errors.hpp"

namespace fpcsim {

Eigen::MatrixXd received_powers(const Eigen::MatrixXcd& h_users,
                                const Eigen::MatrixXcd& w) {
  return (h_users * w).cwiseAbs2();
}

double downlink_sinr(const std::vector<Eigen::MatrixXd>& rx_powers,
                     int user_row, int anchor_sector, int own_column,
                     double noise_mw) {
  const Eigen::MatrixXd& own = rx_powers[anchor_sector];
  const double signal = own(user_row, own_column);
  double interference = own.row(user_row).sum() - signal;
  for (std::size_t j = 0; j < rx_powers.size(); ++j) {
    if (static_cast<int>(j) == anchor_sector) continue;
    interference += rx_powers[j].row(user_row).sum();
  }
  return signal / (interference + noise_mw);
}

double user_throughput_mbps(const Eigen::VectorXd& sinr_linear_per_rb,
                            double data_fraction, double rb_bandwidth_hz,
                            double se_cap) {
  double bits_per_s = 0.0;
  for (int n = 0; n < sinr_linear_per_rb.size(); ++n) {
    const double se = std::min(std::log2(1.0 + sinr_linear_per_rb(n)), se_cap);
    bits_per_s += rb_bandwidth_hz * se;
  }
  return data_fraction * bits_per_s / 1e6;
}

double cell_spectral_efficiency(double sector_sum_throughput_mbps,
                                double bandwidth_mhz) {
  return sector_sum_throughput_mbps / bandwidth_mhz;
}

CdfSeries CdfSeries::from_samples(std::vector<double> samples) {
  CdfSeries s;
  std::sort(samples.begin(), samples.end());
  s.values_ = std::move(samples);
  const std::size_t n = s.values_.size();
  s.cumprob_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.cumprob_[i] = static_cast<double>(i + 1) / static_cast<double>(n);
  }
  return s;
}

double CdfSeries::percentile(double p) const {
  if (values_.empty()) {
    throw RuntimeError("percentile of an empty series");
  }
  const double pos = std::clamp(p, 0.0, 1.0) * (values_.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values_.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values_[lo] + frac * (values_[hi] - values_[lo]);
}

}  // namespace fpcsim
