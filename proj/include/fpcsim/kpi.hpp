// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <vector>

namespace fpcsim {

/// Received power table of one sector on one RB: entry (u, i) is
/// |h_u w_i|^2 in mW for every user row u and precoder column i.
Eigen::MatrixXd received_powers(const Eigen::MatrixXcd& h_users,
                                const Eigen::MatrixXcd& w);

/// Downlink SINR of one user on one RB, assembled from the per-sector
/// received power tables: own column over same-sector cross terms plus all
/// other-sector terms plus noise.
double downlink_sinr(const std::vector<Eigen::MatrixXd>& rx_powers,
                     int user_row, int anchor_sector, int own_column,
                     double noise_mw);

/// Shannon throughput over the scheduled RBs with a spectral-efficiency
/// cap per RB, scaled by the data fraction (T - tau) / T. Returned in
/// Mbit/s.
double user_throughput_mbps(const Eigen::VectorXd& sinr_linear_per_rb,
                            double data_fraction, double rb_bandwidth_hz,
                            double se_cap);

/// Sector sum throughput normalized by the system bandwidth, in bit/s/Hz.
double cell_spectral_efficiency(double sector_sum_throughput_mbps,
                                double bandwidth_mhz);

/// Sorted sample series with strictly increasing cumulative probabilities
/// i/n. Keeps the input multiset (lossless sort).
class CdfSeries {
 public:
  static CdfSeries from_samples(std::vector<double> samples);

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& cumprob() const { return cumprob_; }
  std::size_t size() const { return values_.size(); }

  /// Linear-interpolation percentile: index p * (n - 1) into the sorted
  /// samples. Throws on an empty series.
  double percentile(double p) const;

 private:
  std::vector<double> values_;
  std::vector<double> cumprob_;
};

}  // namespace fpcsim
