// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fpcsim/antenna.hpp"
#include "fpcsim/channel.hpp"
#include "fpcsim/config.hpp"
#include "fpcsim/geometry.hpp"
#include "fpcsim/powerctl.hpp"
#include "fpcsim/precoding.hpp"
#include "fpcsim/training.hpp"

namespace fpcsim {

/// One evaluated configuration of the sweep grid: a power-control setting
/// plus the CSI mode it runs under. All grid points share the same drop
/// seeds, so cross-point comparisons are paired.
struct GridPoint {
  std::string label;
  PowerControlConfig pc;
  CsiMode csi = CsiMode::estimated;
};

/// Fully resolved campaign configuration. `raw` keeps the key-value source;
/// `hash` covers every result-affecting key. The execution keys run.threads
/// and run.out_dir are excluded from the hash, so reruns with different
/// parallelism or output location hash identically.
struct SimConfig {
  int sites = 19;
  double isd_m = 500.0;
  double bs_height_m = 25.0;
  ArrayGeometry array;
  ChannelProfile profile;
  int users_per_sector = 16;
  double bs_power_dbm = 46.0;
  double bs_noise_figure_db = 5.0;
  double ue_noise_figure_db = 9.0;
  double se_cap = 7.8;
  double bandwidth_mhz = 10.0;
  PilotReuse reuse = PilotReuse::r3;
  Criterion criterion = Criterion::zf;
  CsiMode csi = CsiMode::estimated;
  std::vector<GridPoint> grid;
  int drops = 50;
  std::uint64_t master_seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  std::string out_dir = "out";
  std::string name = "run";
  int max_drop_attempts = 100;
  bool write_cdf = true;
  bool dump_channels = false;
  KeyValueConfig raw;
  std::string hash;

  /// Validates the key set, applies defaults and builds the sweep grid.
  /// Unknown keys and invalid values raise ConfigError.
  static SimConfig resolve(const KeyValueConfig& cfg);
};

/// KPI bundle of one (grid point, drop): scalar KPIs plus the per-user
/// sample vectors the pooled CDFs are built from. Bit-identical across
/// reruns of the same (master_seed, drop index).
struct DropKpis {
  int drop = 0;
  int attempts = 1;  // user-drop attempts until the sector fill was feasible
  std::uint64_t redrawn_users = 0;  // candidates re-sampled by the fill cap
  bool pcsi = false;
  double mean_cse = 0.0;
  double fraction_at_max = 0.0;
  std::vector<double> user_throughput_mbps;
  std::vector<double> user_power_dbm;
  std::vector<double> est_sinr_db;  // empty under pCSI
  std::vector<double> dl_sinr_db;   // (user, RB) samples; kept when CDFs are
  std::uint64_t zero_columns = 0;
  std::uint64_t loading_events = 0;
  std::uint64_t clamped_links = 0;

  bool operator==(const DropKpis&) const = default;
};

/// Anchor-link channel record set of one drop, written as a binary file for
/// offline inspection (see README for the exact layout).
struct ChannelDump {
  struct Record {
    std::uint32_t user = 0;
    std::uint32_t sector = 0;
    double attenuation_db = 0.0;
    Eigen::MatrixXcd h;  // ports x rb_count
  };
  int ports = 0;
  int rb_count = 0;
  std::vector<Record> records;

  void write(const std::string& path) const;
};

/// Aggregated KPIs of one grid point plus the per-drop bundles behind them.
struct ResultRow {
  GridPoint point;
  double mean_cse = 0.0;
  double cbt_mbps = 0.0;
  double fraction_at_max = 0.0;
  double est_sinr_p05_db = 0.0;  // NaN under pCSI
  std::vector<DropKpis> drops;
};

struct ResultTable {
  SimConfig config;
  std::vector<ResultRow> rows;
};

NetworkLayout make_layout(const SimConfig& cfg);

/// Executes one Monte Carlo drop for one grid point: user drop, large-scale
/// links, association, power control, pilots, per-sector channel synthesis,
/// estimation, precoding and KPI extraction. Pure function of
/// (cfg.master_seed, drop); infeasible association re-draws the users from
/// a sub-stream keyed by the attempt counter.
DropKpis run_drop(const SimConfig& cfg, const NetworkLayout& layout,
                  const GridPoint& point, int drop,
                  ChannelDump* dump = nullptr);

/// Runs grid x drops with paired drop seeds, flushing one row per drop to
/// drops.csv in deterministic order while workers run ahead. Writes
/// kpi_summary.csv, campaign_summary.csv, optional CDF files and the
/// optional channel dump into cfg.out_dir, then returns the table.
ResultTable run_campaign(const SimConfig& cfg);

/// Row indices maximizing CSE and CBT. Ties break toward smaller alpha,
/// then larger P0; noPC rows lose every tie. Throws on an empty table.
std::pair<std::size_t, std::size_t> best_operating_points(
    const ResultTable& table);

std::vector<std::string> preset_names();
std::string preset_description(const std::string& name);
KeyValueConfig preset_config(const std::string& name);

}  // namespace fpcsim
