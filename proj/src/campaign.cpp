// SPDX-License-Identifier: Apache-2.0

#include "fpcsim/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include "fpcsim/errors.hpp"
#include "fpcsim/kpi.hpp"
#include "fpcsim/linkbudget.hpp"
#include "fpcsim/pathloss.hpp"
#include "fpcsim/rng.hpp"

namespace fpcsim {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (char c : text) {
    if (c == ',') {
      out.push_back(item);
      item.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      item.push_back(c);
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

std::uint64_t parse_seed(const KeyValueConfig& cfg, const std::string& key,
                         std::uint64_t fallback) {
  if (!cfg.has(key)) return fallback;
  const std::string text = cfg.get_string(key, "");
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + text +
                      "' is not an unsigned 64-bit integer");
  }
}

PowerControlConfig named_pc(const std::string& base, int rb_count) {
  if (base == "nopc") return PowerControlConfig::no_pc_preset(rb_count);
  if (base == "fpc05") return PowerControlConfig::fpc05_preset(rb_count);
  if (base == "fpc08") return PowerControlConfig::fpc08_preset(rb_count);
  throw ConfigError("unknown power-control preset '" + base +
                    "' (expected nopc, fpc05 or fpc08)");
}

}  // namespace

SimConfig SimConfig::resolve(const KeyValueConfig& cfg) {
  static const std::vector<std::string> kKnown = {
      "layout.sites",          "layout.isd_m",
      "layout.bs_height_m",    "array.ports",
      "array.rows",            "array.dual_pol",
      "array.spacing_wl",      "array.downtilt_deg",
      "array.element_gain_dbi","array.hpbw_deg",
      "array.fbr_db",          "sys.users_per_sector",
      "sys.rb_count",          "sys.rb_bandwidth_hz",
      "sys.bandwidth_mhz",     "sys.fc_ghz",
      "sys.bs_power_dbm",      "sys.bs_noise_figure_db",
      "sys.ue_noise_figure_db","sys.se_cap",
      "chan.clusters_nlos",    "chan.clusters_los",
      "chan.azimuth_spread_deg","chan.zenith_spread_deg",
      "chan.delay_spread_ns",  "chan.xpr_db",
      "chan.shadow_sigma_los_db","chan.shadow_sigma_nlos_db",
      "pilot.reuse",           "bf.criterion",
      "csi.mode",              "pc.preset",
      "pc.mode",               "pc.p0_dbm",
      "pc.alpha",              "pc.p_max_dbm",
      "sweep.presets",         "sweep.p0_dbm",
      "sweep.alpha",           "sweep.include_nopc",
      "run.name",              "run.drops",
      "run.seed",              "run.threads",
      "run.out_dir",           "run.max_drop_attempts",
      "out.cdf",               "dump.channels",
  };
  cfg.check_known_keys(kKnown);

  SimConfig out;
  out.raw = cfg;

  out.sites = cfg.get_int("layout.sites", 19);
  out.isd_m = cfg.get_double("layout.isd_m", 500.0);
  out.bs_height_m = cfg.get_double("layout.bs_height_m", 25.0);
  if (out.isd_m <= 0.0) throw ConfigError("layout.isd_m must be positive");

  out.array.ports = cfg.get_int("array.ports", 128);
  out.array.rows = cfg.get_int("array.rows", 4);
  out.array.dual_pol = cfg.get_bool("array.dual_pol", true);
  out.array.element_spacing_wl = cfg.get_double("array.spacing_wl", 0.5);
  out.array.downtilt_deg = cfg.get_double("array.downtilt_deg", 12.0);
  out.array.element_gain_dbi = cfg.get_double("array.element_gain_dbi", 8.0);
  out.array.hpbw_deg = cfg.get_double("array.hpbw_deg", 65.0);
  out.array.fbr_db = cfg.get_double("array.fbr_db", 30.0);
  out.array.validate();

  out.users_per_sector = cfg.get_int("sys.users_per_sector", 16);
  if (out.users_per_sector < 1) {
    throw ConfigError("sys.users_per_sector must be >= 1");
  }
  if (out.users_per_sector > out.array.ports) {
    throw ConfigError("sys.users_per_sector must not exceed array.ports");
  }
  out.profile.rb_count = cfg.get_int("sys.rb_count", 50);
  if (out.profile.rb_count < 1) throw ConfigError("sys.rb_count must be >= 1");
  out.profile.rb_bandwidth_hz = cfg.get_double("sys.rb_bandwidth_hz", 180e3);
  out.profile.fc_ghz = cfg.get_double("sys.fc_ghz", 2.0);
  // Occupied RBs cover 90% of the system band (10 MHz for 50 RBs).
  out.bandwidth_mhz = cfg.get_double(
      "sys.bandwidth_mhz",
      out.profile.rb_count * out.profile.rb_bandwidth_hz / 0.9e6);
  if (out.bandwidth_mhz <= 0.0) throw ConfigError("sys.bandwidth_mhz must be positive");
  out.bs_power_dbm = cfg.get_double("sys.bs_power_dbm", 46.0);
  out.bs_noise_figure_db = cfg.get_double("sys.bs_noise_figure_db", 5.0);
  out.ue_noise_figure_db = cfg.get_double("sys.ue_noise_figure_db", 9.0);
  out.se_cap = cfg.get_double("sys.se_cap", 7.8);
  if (out.se_cap <= 0.0) throw ConfigError("sys.se_cap must be positive");

  out.profile.clusters_nlos = cfg.get_int("chan.clusters_nlos", 12);
  out.profile.clusters_los = cfg.get_int("chan.clusters_los", 8);
  if (out.profile.clusters_nlos < 1 || out.profile.clusters_los < 1) {
    throw ConfigError("cluster counts must be >= 1");
  }
  out.profile.azimuth_spread_deg = cfg.get_double("chan.azimuth_spread_deg", 10.0);
  out.profile.zenith_spread_deg = cfg.get_double("chan.zenith_spread_deg", 5.0);
  out.profile.delay_spread_ns = cfg.get_double("chan.delay_spread_ns", 300.0);
  out.profile.xpr_db = cfg.get_double("chan.xpr_db", 8.0);
  out.profile.shadow_sigma_los_db = cfg.get_double("chan.shadow_sigma_los_db", 4.0);
  out.profile.shadow_sigma_nlos_db = cfg.get_double("chan.shadow_sigma_nlos_db", 6.0);

  const std::string reuse = to_lower(cfg.get_string("pilot.reuse", "r3"));
  if (reuse == "r1") {
    out.reuse = PilotReuse::r1;
  } else if (reuse == "r3") {
    out.reuse = PilotReuse::r3;
  } else {
    throw ConfigError("pilot.reuse must be r1 or r3");
  }

  const std::string bf = to_lower(cfg.get_string("bf.criterion", "zf"));
  if (bf == "mrt") {
    out.criterion = Criterion::mrt;
  } else if (bf == "zf") {
    out.criterion = Criterion::zf;
  } else {
    throw ConfigError("bf.criterion must be mrt or zf");
  }

  const std::string csi = to_lower(cfg.get_string("csi.mode", "estimated"));
  if (csi == "estimated") {
    out.csi = CsiMode::estimated;
  } else if (csi == "pcsi") {
    out.csi = CsiMode::pcsi;
  } else {
    throw ConfigError("csi.mode must be estimated or pcsi");
  }

  const int rb_count = out.profile.rb_count;
  if (cfg.has("sweep.presets")) {
    for (const std::string& raw_token :
         split_list(cfg.get_string("sweep.presets", ""))) {
      const std::string token = to_lower(raw_token);
      std::string base = token;
      CsiMode mode = out.csi;
      const std::string suffix = "_pcsi";
      if (base.size() > suffix.size() &&
          base.compare(base.size() - suffix.size(), suffix.size(), suffix) == 0) {
        base = base.substr(0, base.size() - suffix.size());
        mode = CsiMode::pcsi;
      }
      out.grid.push_back({token, named_pc(base, rb_count), mode});
    }
    if (out.grid.empty()) throw ConfigError("sweep.presets is empty");
  } else if (cfg.has("sweep.p0_dbm") || cfg.has("sweep.alpha")) {
    if (!cfg.has("sweep.p0_dbm") || !cfg.has("sweep.alpha")) {
      throw ConfigError("sweep.p0_dbm and sweep.alpha must be given together");
    }
    const std::vector<double> p0s = cfg.get_double_list("sweep.p0_dbm", {});
    const std::vector<double> alphas = cfg.get_double_list("sweep.alpha", {});
    if (p0s.empty() || alphas.empty()) {
      throw ConfigError("sweep lists must be non-empty");
    }
    for (double p0 : p0s) {
      for (double a : alphas) {
        PowerControlConfig pc{PowerControlMode::fpc, p0, a, 23.0, rb_count};
        out.grid.push_back(
            {"p0=" + fmt_short(p0) + "_a=" + fmt_short(a), pc, out.csi});
      }
    }
    if (cfg.get_bool("sweep.include_nopc", false)) {
      out.grid.push_back(
          {"nopc", PowerControlConfig::no_pc_preset(rb_count), out.csi});
    }
  } else {
    const std::string preset = to_lower(cfg.get_string("pc.preset", "custom"));
    if (preset != "custom") {
      out.grid.push_back({preset, named_pc(preset, rb_count), out.csi});
    } else {
      PowerControlConfig pc;
      const std::string mode = to_lower(cfg.get_string("pc.mode", "fpc"));
      if (mode == "nopc") {
        pc.mode = PowerControlMode::no_pc;
      } else if (mode == "fpc") {
        pc.mode = PowerControlMode::fpc;
      } else {
        throw ConfigError("pc.mode must be nopc or fpc");
      }
      pc.p0_dbm = cfg.get_double("pc.p0_dbm", -60.0);
      pc.alpha = cfg.get_double("pc.alpha", 0.5);
      pc.p_max_dbm = cfg.get_double("pc.p_max_dbm", 23.0);
      pc.rb_count = rb_count;
      const std::string label =
          pc.mode == PowerControlMode::no_pc
              ? "nopc"
              : "p0=" + fmt_short(pc.p0_dbm) + "_a=" + fmt_short(pc.alpha);
      out.grid.push_back({label, pc, out.csi});
    }
  }
  for (const GridPoint& g : out.grid) g.pc.validate();

  out.name = cfg.get_string("run.name", "run");
  out.drops = cfg.get_int("run.drops", 50);
  if (out.drops < 1) throw ConfigError("run.drops must be >= 1");
  out.master_seed = parse_seed(cfg, "run.seed", 1);
  out.threads = cfg.get_int("run.threads", 0);
  if (out.threads < 0) throw ConfigError("run.threads must be >= 0");
  out.out_dir = cfg.get_string("run.out_dir", "out");
  out.max_drop_attempts = cfg.get_int("run.max_drop_attempts", 100);
  if (out.max_drop_attempts < 1) {
    throw ConfigError("run.max_drop_attempts must be >= 1");
  }
  out.write_cdf = cfg.get_bool("out.cdf", true);
  out.dump_channels = cfg.get_bool("dump.channels", false);

  KeyValueConfig hashed;
  for (const auto& [key, value] : cfg.entries()) {
    if (key == "run.threads" || key == "run.out_dir") continue;
    hashed.set(key, value);
  }
  out.hash = hashed.hash();
  return out;
}

NetworkLayout make_layout(const SimConfig& cfg) {
  return build_layout(cfg.sites, cfg.isd_m, cfg.bs_height_m);
}

DropKpis run_drop(const SimConfig& cfg, const NetworkLayout& layout,
                  const GridPoint& point, int drop, ChannelDump* dump) {
  const int n_sectors = layout.sectors();
  const int n_sites = layout.sites();
  const int n_users_per_sector = cfg.users_per_sector;
  const int n_rbs = cfg.profile.rb_count;
  const int n_ports = cfg.array.ports;
  const int n_users = n_users_per_sector * n_sectors;
  const std::uint64_t seed = cfg.master_seed;

  const double sigma_ul =
      noise_power_mw(cfg.profile.rb_bandwidth_hz, cfg.bs_noise_figure_db);
  const double sigma_pilot = sigma_ul / kSubcarriersPerRb;
  const double sigma_dl =
      noise_power_mw(cfg.profile.rb_bandwidth_hz, cfg.ue_noise_figure_db);
  const double p_rb = dbm_to_mw(cfg.bs_power_dbm) / n_rbs;

  DropKpis kpis;
  kpis.drop = drop;
  kpis.pcsi = point.csi == CsiMode::pcsi;

  std::vector<UserTerminal> users;
  std::vector<std::vector<LinkGeometry>> geoms;
  std::vector<std::vector<LinkState>> states;
  std::vector<int> anchors;
  ClampCounter clamps;

  // Users are accepted only at their strongest sector. A candidate whose
  // best sector already holds its quota is re-sampled instead of being
  // spilled to a weaker anchor, so the per-sector cap never displaces a
  // served user away from its argmin-attenuation sector.
  constexpr std::uint64_t kCandidateBlock = std::uint64_t{1} << 24;
  const std::uint64_t cand_cap =
      std::min<std::uint64_t>(kCandidateBlock,
                              200 * static_cast<std::uint64_t>(n_users));
  bool filled = false;
  int attempt = 0;
  for (; attempt < cfg.max_drop_attempts && !filled; ++attempt) {
    users.clear();
    geoms.clear();
    states.clear();
    anchors.clear();
    clamps = ClampCounter{};
    std::vector<int> load(n_sectors, 0);
    RngStream drop_rng(seed, StreamTag::user_drop, drop, attempt);
    const std::uint64_t attempt_base =
        static_cast<std::uint64_t>(attempt) * kCandidateBlock;
    std::uint64_t cand = 0;
    while (static_cast<int>(users.size()) < n_users && cand < cand_cap) {
      UserTerminal cu = draw_user(layout, drop_rng);
      std::vector<LinkGeometry> cg(n_sectors);
      std::vector<LinkState> cs(n_sectors);
      int best = 0;
      for (int s = 0; s < n_sectors; ++s) {
        cg[s] = link_geometry(layout, s, cu.position, cu.ue_height_m,
                              cfg.array.downtilt_deg);
        // LOS is keyed per (candidate, site), so co-site sectors share
        // the flag.
        RngStream los_rng(seed, StreamTag::los, drop,
                          (attempt_base + cand) * n_sites +
                              layout.site_of_sector(s));
        RngStream shadow_rng(seed, StreamTag::shadowing, drop,
                             (attempt_base + cand) * n_sectors + s);
        cs[s] = large_scale(cg[s], cu, cfg.array, cfg.profile,
                            layout.bs_height, los_rng, shadow_rng, &clamps);
        if (cs[s].attenuation_db < cs[best].attenuation_db) best = s;
      }
      ++cand;
      if (load[best] >= n_users_per_sector) {
        ++kpis.redrawn_users;
        continue;
      }
      ++load[best];
      cu.anchor_sector = best;
      users.push_back(std::move(cu));
      geoms.push_back(std::move(cg));
      states.push_back(std::move(cs));
      anchors.push_back(best);
    }
    filled = static_cast<int>(users.size()) == n_users;
  }
  if (!filled) {
    throw RuntimeError("user association infeasible after " +
                       std::to_string(cfg.max_drop_attempts) + " attempts");
  }
  kpis.attempts = attempt;
  kpis.clamped_links = clamps.total();

  Eigen::VectorXd anchor_l(n_users);
  for (int u = 0; u < n_users; ++u) {
    anchor_l(u) = states[u][anchors[u]].attenuation_db;
  }

  PowerControlConfig pc = point.pc;
  pc.rb_count = n_rbs;
  const PowerPlan plan = plan_powers(pc, anchor_l);
  kpis.fraction_at_max = plan.fraction_at_max;
  kpis.user_power_dbm.assign(plan.power_dbm.data(),
                             plan.power_dbm.data() + n_users);

  const PilotPlan pilots =
      allocate_pilots(layout, anchors, cfg.reuse, n_users_per_sector);
  const double data_fraction = pilots.data_fraction();

  std::vector<std::vector<int>> sched(n_sectors);
  for (int u = 0; u < n_users; ++u) sched[anchors[u]].push_back(u);
  std::vector<std::vector<int>> contams(n_users);
  for (int u = 0; u < n_users; ++u) {
    contams[u] = contaminators(pilots, anchors, u);
  }

  Eigen::MatrixXd signal = Eigen::MatrixXd::Zero(n_users, n_rbs);
  Eigen::MatrixXd intra = Eigen::MatrixXd::Zero(n_users, n_rbs);
  Eigen::MatrixXd inter = Eigen::MatrixXd::Zero(n_users, n_rbs);
  std::vector<double> est_sinr(n_users, 0.0);

  // Per-RB channel of every user toward the current sector; reused across
  // the sector loop to bound memory at one sector's tensor.
  std::vector<Eigen::MatrixXcd> ch(n_rbs);
  for (int n = 0; n < n_rbs; ++n) ch[n].resize(n_users, n_ports);

  for (int j = 0; j < n_sectors; ++j) {
    for (int u = 0; u < n_users; ++u) {
      RngStream cluster_rng(seed, StreamTag::clusters, drop,
                            static_cast<std::uint64_t>(u) * n_sectors + j);
      const ClusterState clusters = draw_clusters(
          states[u][j].los, geoms[u][j], cfg.profile, cluster_rng);
      const Eigen::MatrixXcd response = cluster_port_response(
          clusters, cfg.array, states[u][j].attenuation_db);
      const Eigen::MatrixXcd h_all =
          small_scale_all_rbs(response, clusters.delay_s, cfg.profile);
      for (int n = 0; n < n_rbs; ++n) {
        ch[n].row(u) = h_all.col(n).transpose();
      }
      if (dump && anchors[u] == j) {
        dump->records.push_back({static_cast<std::uint32_t>(u),
                                 static_cast<std::uint32_t>(j),
                                 states[u][j].attenuation_db, h_all});
      }
    }

    const std::vector<int>& own = sched[j];
    const int k_sched = static_cast<int>(own.size());

    if (!kpis.pcsi) {
      Eigen::VectorXd sum_norm2 = Eigen::VectorXd::Zero(n_users);
      for (int n = 0; n < n_rbs; ++n) {
        sum_norm2 += ch[n].rowwise().squaredNorm();
      }
      for (int k : own) {
        const std::vector<int>& c = contams[k];
        Eigen::VectorXd q_i(c.size());
        Eigen::VectorXd s_i(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
          q_i(i) = plan.rb_power_mw(c[i]);
          s_i(i) = sum_norm2(c[i]);
        }
        est_sinr[k] = estimation_sinr_db(plan.rb_power_mw(k), sum_norm2(k),
                                         q_i, s_i, n_rbs, n_ports, sigma_pilot);
      }
    }

    for (int n = 0; n < n_rbs; ++n) {
      Eigen::MatrixXcd h_hat(k_sched, n_ports);
      for (int idx = 0; idx < k_sched; ++idx) {
        const int k = own[idx];
        if (kpis.pcsi) {
          h_hat.row(idx) = ch[n].row(k);
          continue;
        }
        const Eigen::VectorXcd desired = ch[n].row(k).transpose();
        const std::vector<int>& c = contams[k];
        Eigen::MatrixXcd interferers(n_ports, c.size());
        Eigen::VectorXd q_i(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
          interferers.col(i) = ch[n].row(c[i]).transpose();
          q_i(i) = plan.rb_power_mw(c[i]);
        }
        RngStream noise_rng(
            seed, StreamTag::pilot_noise, drop,
            (static_cast<std::uint64_t>(j) * n_users_per_sector +
             pilots.pilot_index[k]) *
                    n_rbs +
                n);
        Eigen::VectorXcd noise(n_ports);
        for (int m = 0; m < n_ports; ++m) {
          noise(m) = noise_rng.cnormal(sigma_pilot);
        }
        h_hat.row(idx) =
            ls_estimate(desired, plan.rb_power_mw(k), interferers, q_i, noise)
                .transpose();
      }

      const PrecodingMatrix<std::complex<double>> pm =
          precode(cfg.criterion, h_hat, p_rb);
      kpis.zero_columns += pm.zero_rows;
      kpis.loading_events += pm.loading_events;

      const Eigen::MatrixXd rx = received_powers(ch[n], pm.w);
      const Eigen::VectorXd row_sum = rx.rowwise().sum();
      for (int u = 0; u < n_users; ++u) {
        if (anchors[u] != j) inter(u, n) += row_sum(u);
      }
      for (int idx = 0; idx < k_sched; ++idx) {
        const int k = own[idx];
        signal(k, n) = rx(k, idx);
        intra(k, n) = row_sum(k) - rx(k, idx);
      }
    }
  }

  kpis.user_throughput_mbps.resize(n_users);
  if (cfg.write_cdf) {
    kpis.dl_sinr_db.reserve(static_cast<std::size_t>(n_users) * n_rbs);
  }
  double total_thr = 0.0;
  Eigen::VectorXd sinr_rb(n_rbs);
  for (int u = 0; u < n_users; ++u) {
    for (int n = 0; n < n_rbs; ++n) {
      sinr_rb(n) = signal(u, n) / (intra(u, n) + inter(u, n) + sigma_dl);
      if (cfg.write_cdf) {
        kpis.dl_sinr_db.push_back(
            10.0 * std::log10(std::max(sinr_rb(n), 1e-30)));
      }
    }
    kpis.user_throughput_mbps[u] =
        user_throughput_mbps(sinr_rb, data_fraction,
                             cfg.profile.rb_bandwidth_hz, cfg.se_cap);
    total_thr += kpis.user_throughput_mbps[u];
  }
  kpis.mean_cse = total_thr / (cfg.bandwidth_mhz * n_sectors);
  if (!kpis.pcsi) kpis.est_sinr_db = std::move(est_sinr);
  if (dump) {
    dump->ports = n_ports;
    dump->rb_count = n_rbs;
  }
  return kpis;
}

void ChannelDump::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw RuntimeError("cannot write channel dump " + path);
  const char magic[8] = {'F', 'P', 'C', 'C', 'H', 'D', 'M', 'P'};
  f.write(magic, 8);
  const auto put_u32 = [&f](std::uint32_t v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof v);
  };
  const auto put_f64 = [&f](double v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof v);
  };
  put_u32(1u);  // format version
  put_u32(static_cast<std::uint32_t>(ports));
  put_u32(static_cast<std::uint32_t>(rb_count));
  put_u32(static_cast<std::uint32_t>(records.size()));
  for (const Record& r : records) {
    put_u32(r.user);
    put_u32(r.sector);
    put_f64(r.attenuation_db);
    for (int m = 0; m < ports; ++m) {
      for (int n = 0; n < rb_count; ++n) {
        put_f64(r.h(m, n).real());
        put_f64(r.h(m, n).imag());
      }
    }
  }
  if (!f) throw RuntimeError("short write on channel dump " + path);
}

namespace {

void write_cdf_file(const std::filesystem::path& path,
                    std::vector<double> samples) {
  if (samples.empty()) return;
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw RuntimeError("cannot write " + path.string());
  f << "value,cumprob\n";
  const CdfSeries cdf = CdfSeries::from_samples(std::move(samples));
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    f << fmt(cdf.values()[i]) << ',' << fmt(cdf.cumprob()[i]) << '\n';
  }
}

void write_outputs(const ResultTable& table) {
  namespace fs = std::filesystem;
  const SimConfig& cfg = table.config;
  const fs::path dir(cfg.out_dir);

  {
    std::ofstream f(dir / "kpi_summary.csv", std::ios::trunc);
    if (!f) throw RuntimeError("cannot write kpi_summary.csv");
    f << "config_hash,p0_dbm,alpha,m_ports,reuse,bf,csi_mode,mean_cse,"
         "cbt_mbps,fraction_at_max,drops,seed\n";
    for (const ResultRow& row : table.rows) {
      const bool fpc = row.point.pc.mode == PowerControlMode::fpc;
      f << cfg.hash << ',' << (fpc ? fmt(row.point.pc.p0_dbm) : "") << ','
        << (fpc ? fmt(row.point.pc.alpha) : "") << ',' << cfg.array.ports
        << ',' << (cfg.reuse == PilotReuse::r1 ? "r1" : "r3") << ','
        << (cfg.criterion == Criterion::mrt ? "mrt" : "zf") << ','
        << (row.point.csi == CsiMode::pcsi ? "pcsi" : "estimated") << ','
        << fmt(row.mean_cse) << ',' << fmt(row.cbt_mbps) << ','
        << fmt(row.fraction_at_max) << ',' << cfg.drops << ','
        << cfg.master_seed << '\n';
    }
  }

  if (cfg.write_cdf) {
    const bool single = table.rows.size() == 1;
    for (std::size_t g = 0; g < table.rows.size(); ++g) {
      const ResultRow& row = table.rows[g];
      const std::string suffix =
          single ? ".csv" : "_g" + std::to_string(g) + ".csv";
      std::vector<double> power, thr, est, dl;
      for (const DropKpis& k : row.drops) {
        power.insert(power.end(), k.user_power_dbm.begin(),
                     k.user_power_dbm.end());
        thr.insert(thr.end(), k.user_throughput_mbps.begin(),
                   k.user_throughput_mbps.end());
        est.insert(est.end(), k.est_sinr_db.begin(), k.est_sinr_db.end());
        dl.insert(dl.end(), k.dl_sinr_db.begin(), k.dl_sinr_db.end());
      }
      write_cdf_file(dir / ("cdf_power" + suffix), std::move(power));
      write_cdf_file(dir / ("cdf_throughput" + suffix), std::move(thr));
      write_cdf_file(dir / ("cdf_est_sinr" + suffix), std::move(est));
      write_cdf_file(dir / ("cdf_dl_sinr" + suffix), std::move(dl));
    }
  }

  {
    const auto [best_cse, best_cbt] = best_operating_points(table);
    std::uint64_t redrops = 0, redrawn = 0, loading = 0, zeros = 0,
                  clamped = 0;
    for (const ResultRow& row : table.rows) {
      for (const DropKpis& k : row.drops) {
        redrops += static_cast<std::uint64_t>(k.attempts - 1);
        redrawn += k.redrawn_users;
        loading += k.loading_events;
        zeros += k.zero_columns;
        clamped += k.clamped_links;
      }
    }
    std::ofstream f(dir / "campaign_summary.csv", std::ios::trunc);
    if (!f) throw RuntimeError("cannot write campaign_summary.csv");
    const auto point_fields = [&](const ResultRow& row) {
      const bool fpc = row.point.pc.mode == PowerControlMode::fpc;
      return row.point.label + ',' + (fpc ? fmt(row.point.pc.p0_dbm) : "") +
             ',' + (fpc ? fmt(row.point.pc.alpha) : "");
    };
    f << "key,value\n";
    f << "config_hash," << cfg.hash << '\n';
    f << "name," << cfg.name << '\n';
    f << "sites," << cfg.sites << '\n';
    f << "sectors," << 3 * cfg.sites << '\n';
    f << "m_ports," << cfg.array.ports << '\n';
    f << "users_per_sector," << cfg.users_per_sector << '\n';
    f << "rb_count," << cfg.profile.rb_count << '\n';
    f << "reuse," << (cfg.reuse == PilotReuse::r1 ? "r1" : "r3") << '\n';
    f << "bf," << (cfg.criterion == Criterion::mrt ? "mrt" : "zf") << '\n';
    f << "drops," << cfg.drops << '\n';
    f << "seed," << cfg.master_seed << '\n';
    f << "grid_points," << table.rows.size() << '\n';
    f << "redrops_total," << redrops << '\n';
    f << "redrawn_users_total," << redrawn << '\n';
    f << "zf_loading_events," << loading << '\n';
    f << "zero_columns," << zeros << '\n';
    f << "clamped_links," << clamped << '\n';
    f << "best_cse_point," << point_fields(table.rows[best_cse]) << '\n';
    f << "best_cse_value," << fmt(table.rows[best_cse].mean_cse) << '\n';
    f << "best_cbt_point," << point_fields(table.rows[best_cbt]) << '\n';
    f << "best_cbt_value," << fmt(table.rows[best_cbt].cbt_mbps) << '\n';
  }
}

}  // namespace

ResultTable run_campaign(const SimConfig& cfg) {
  if (cfg.grid.empty()) throw ConfigError("empty sweep grid");
  const NetworkLayout layout = make_layout(cfg);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) {
    throw RuntimeError("cannot create output directory " + cfg.out_dir);
  }
  std::ofstream drops_csv(fs::path(cfg.out_dir) / "drops.csv",
                          std::ios::trunc);
  if (!drops_csv) throw RuntimeError("cannot write drops.csv");

  const std::size_t n_grid = cfg.grid.size();
  const std::size_t n_drops = static_cast<std::size_t>(cfg.drops);
  const std::size_t total = n_grid * n_drops;

  std::vector<std::vector<std::optional<DropKpis>>> slots(
      n_grid, std::vector<std::optional<DropKpis>>(n_drops));
  ChannelDump dump;

  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure = nullptr;
  bool stop = false;

  std::size_t n_threads =
      cfg.threads > 0
          ? static_cast<std::size_t>(cfg.threads)
          : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, total);

  const auto worker = [&]() {
    for (;;) {
      {
        std::lock_guard<std::mutex> lk(mu);
        if (stop) return;
      }
      const std::size_t t = next.fetch_add(1);
      if (t >= total) return;
      const std::size_t g = t / n_drops;
      const std::size_t d = t % n_drops;
      try {
        ChannelDump* sink =
            (cfg.dump_channels && g == 0 && d == 0) ? &dump : nullptr;
        DropKpis kpis =
            run_drop(cfg, layout, cfg.grid[g], static_cast<int>(d), sink);
        std::lock_guard<std::mutex> lk(mu);
        slots[g][d] = std::move(kpis);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);

  // Ordered flush: one row per completed drop, in (grid, drop) order, so
  // output bytes are independent of scheduling and an interrupted run keeps
  // every fully flushed drop.
  drops_csv << "grid_index,label,drop,attempts,redrawn_users,users,mean_cse,"
               "fraction_at_max,cbt_drop_mbps,zero_columns,loading_events,"
               "clamped_links\n";
  bool aborted = false;
  for (std::size_t g = 0; g < n_grid && !aborted; ++g) {
    for (std::size_t d = 0; d < n_drops && !aborted; ++d) {
      std::unique_lock<std::mutex> lk(mu);
      cv.wait(lk, [&] { return slots[g][d].has_value() || failure; });
      if (!slots[g][d].has_value()) {
        aborted = true;
        break;
      }
      const DropKpis& k = *slots[g][d];
      lk.unlock();
      const double cbt_drop =
          CdfSeries::from_samples(k.user_throughput_mbps).percentile(0.05);
      drops_csv << g << ',' << cfg.grid[g].label << ',' << k.drop << ','
                << k.attempts << ',' << k.redrawn_users << ','
                << k.user_throughput_mbps.size() << ','
                << fmt(k.mean_cse) << ',' << fmt(k.fraction_at_max) << ','
                << fmt(cbt_drop) << ',' << k.zero_columns << ','
                << k.loading_events << ',' << k.clamped_links << '\n';
      drops_csv.flush();
    }
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  ResultTable table;
  table.config = cfg;
  table.rows.reserve(n_grid);
  for (std::size_t g = 0; g < n_grid; ++g) {
    ResultRow row;
    row.point = cfg.grid[g];
    std::vector<double> thr_pool;
    std::vector<double> est_pool;
    double cse_sum = 0.0;
    double frac_sum = 0.0;
    for (std::optional<DropKpis>& slot : slots[g]) {
      DropKpis& k = *slot;
      cse_sum += k.mean_cse;
      frac_sum += k.fraction_at_max;
      thr_pool.insert(thr_pool.end(), k.user_throughput_mbps.begin(),
                      k.user_throughput_mbps.end());
      est_pool.insert(est_pool.end(), k.est_sinr_db.begin(),
                      k.est_sinr_db.end());
      row.drops.push_back(std::move(k));
    }
    row.mean_cse = cse_sum / static_cast<double>(n_drops);
    row.fraction_at_max = frac_sum / static_cast<double>(n_drops);
    row.cbt_mbps = CdfSeries::from_samples(std::move(thr_pool)).percentile(0.05);
    row.est_sinr_p05_db =
        est_pool.empty()
            ? std::numeric_limits<double>::quiet_NaN()
            : CdfSeries::from_samples(std::move(est_pool)).percentile(0.05);
    table.rows.push_back(std::move(row));
  }

  write_outputs(table);
  if (cfg.dump_channels) {
    dump.write((fs::path(cfg.out_dir) / "channel_dump.bin").string());
  }

  std::cout << "campaign " << cfg.name << " hash=" << cfg.hash
            << " grid=" << n_grid << " drops=" << cfg.drops
            << " out=" << cfg.out_dir << '\n';
  for (const ResultRow& row : table.rows) {
    std::cout << "  " << row.point.label << ": cse=" << fmt(row.mean_cse)
              << " bit/s/Hz cbt=" << fmt(row.cbt_mbps)
              << " Mbit/s at_max=" << fmt(row.fraction_at_max) << '\n';
  }
  return table;
}

std::pair<std::size_t, std::size_t> best_operating_points(
    const ResultTable& table) {
  if (table.rows.empty()) throw RuntimeError("empty result table");
  const auto tie_key = [](const ResultRow& r) {
    const bool fpc = r.point.pc.mode == PowerControlMode::fpc;
    const double inf = std::numeric_limits<double>::infinity();
    // smaller alpha wins, then larger P0; noPC rows lose every tie
    return std::pair<double, double>(fpc ? r.point.pc.alpha : inf,
                                     fpc ? -r.point.pc.p0_dbm : inf);
  };
  std::size_t best_cse = 0;
  std::size_t best_cbt = 0;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const ResultRow& r = table.rows[i];
    const ResultRow& c = table.rows[best_cse];
    if (r.mean_cse > c.mean_cse ||
        (r.mean_cse == c.mean_cse && tie_key(r) < tie_key(c))) {
      best_cse = i;
    }
    const ResultRow& b = table.rows[best_cbt];
    if (r.cbt_mbps > b.cbt_mbps ||
        (r.cbt_mbps == b.cbt_mbps && tie_key(r) < tie_key(b))) {
      best_cbt = i;
    }
  }
  return {best_cse, best_cbt};
}

namespace {

KeyValueConfig full_base(const std::string& name) {
  KeyValueConfig c;
  c.set("layout.sites", "19");
  c.set("layout.isd_m", "500");
  c.set("sys.users_per_sector", "16");
  c.set("sys.rb_count", "50");
  c.set("run.drops", "50");
  c.set("run.seed", "1");
  c.set("run.name", name);
  c.set("run.out_dir", "out_" + name);
  return c;
}

KeyValueConfig desk_base(const std::string& name) {
  KeyValueConfig c;
  c.set("layout.sites", "7");
  c.set("layout.isd_m", "500");
  c.set("array.ports", "32");
  c.set("sys.users_per_sector", "8");
  c.set("sys.rb_count", "12");
  c.set("run.drops", "20");
  c.set("run.seed", "1");
  c.set("run.name", name);
  c.set("run.out_dir", "out_" + name);
  return c;
}

constexpr const char* kAlphaGrid = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
constexpr const char* kP0Grid = "-120,-100,-80,-60";

struct PresetDef {
  const char* name;
  const char* description;
  KeyValueConfig (*build)();
};

const PresetDef kPresets[] = {
    {"fig1", "CSE surface over (P0, alpha), M=128, ZF, reuse 3",
     [] {
       KeyValueConfig c = full_base("fig1");
       c.set("array.ports", "128");
       c.set("bf.criterion", "zf");
       c.set("pilot.reuse", "r3");
       c.set("sweep.p0_dbm", kP0Grid);
       c.set("sweep.alpha", kAlphaGrid);
       c.set("out.cdf", "false");
       return c;
     }},
    {"fig2", "CBT surface over (P0, alpha), M=128, ZF, reuse 3",
     [] {
       KeyValueConfig c = full_base("fig2");
       c.set("array.ports", "128");
       c.set("bf.criterion", "zf");
       c.set("pilot.reuse", "r3");
       c.set("sweep.p0_dbm", kP0Grid);
       c.set("sweep.alpha", kAlphaGrid);
       c.set("sweep.include_nopc", "true");
       c.set("out.cdf", "false");
       return c;
     }},
    {"fig3", "Transmit-power CDFs for noPC/FPC_0.5/FPC_0.8, M=128, ZF, reuse 3",
     [] {
       KeyValueConfig c = full_base("fig3");
       c.set("array.ports", "128");
       c.set("bf.criterion", "zf");
       c.set("pilot.reuse", "r3");
       c.set("sweep.presets", "nopc,fpc05,fpc08");
       c.set("out.cdf", "true");
       return c;
     }},
    {"fig4",
     "Estimation-SINR CDFs for noPC/FPC_0.5/FPC_0.8, M=128, ZF, reuse 3",
     [] {
       KeyValueConfig c = full_base("fig4");
       c.set("array.ports", "128");
       c.set("bf.criterion", "zf");
       c.set("pilot.reuse", "r3");
       c.set("sweep.presets", "nopc,fpc05,fpc08");
       c.set("out.cdf", "true");
       return c;
     }},
    {"fig5", "Power-control comparison at M=64, MRT, reuse 3",
     [] {
       KeyValueConfig c = full_base("fig5");
       c.set("array.ports", "64");
       c.set("bf.criterion", "mrt");
       c.set("pilot.reuse", "r3");
       c.set("sweep.presets", "nopc,fpc05,fpc08");
       return c;
     }},
    {"fig6", "Power-control comparison at M=128, MRT, reuse 3",
     [] {
       KeyValueConfig c = full_base("fig6");
       c.set("array.ports", "128");
       c.set("bf.criterion", "mrt");
       c.set("pilot.reuse", "r3");
       c.set("sweep.presets", "nopc,fpc05,fpc08");
       return c;
     }},
    {"fig7", "Power-control comparison at M=256, MRT, reuse 3",
     [] {
       KeyValueConfig c = full_base("fig7");
       c.set("array.ports", "256");
       c.set("bf.criterion", "mrt");
       c.set("pilot.reuse", "r3");
       c.set("sweep.presets", "nopc,fpc05,fpc08");
       return c;
     }},
    {"fig8", "Power-control comparison at M=128, MRT, reuse 1",
     [] {
       KeyValueConfig c = full_base("fig8");
       c.set("array.ports", "128");
       c.set("bf.criterion", "mrt");
       c.set("pilot.reuse", "r1");
       c.set("sweep.presets", "nopc,fpc05,fpc08");
       return c;
     }},
    {"fig9", "Estimated vs perfect CSI, M=128, MRT, reuse 3",
     [] {
       KeyValueConfig c = full_base("fig9");
       c.set("array.ports", "128");
       c.set("bf.criterion", "mrt");
       c.set("pilot.reuse", "r3");
       c.set("sweep.presets",
             "nopc,fpc05,fpc08,nopc_pcsi,fpc05_pcsi,fpc08_pcsi");
       return c;
     }},
    {"fig10", "Estimated vs perfect CSI, M=128, ZF, reuse 3",
     [] {
       KeyValueConfig c = full_base("fig10");
       c.set("array.ports", "128");
       c.set("bf.criterion", "zf");
       c.set("pilot.reuse", "r3");
       c.set("sweep.presets",
             "nopc,fpc05,fpc08,nopc_pcsi,fpc05_pcsi,fpc08_pcsi");
       return c;
     }},
    {"desk1", "Desk scale: noPC/FPC_0.5/FPC_0.8, M=32, ZF, reuse 3",
     [] {
       KeyValueConfig c = desk_base("desk1");
       c.set("bf.criterion", "zf");
       c.set("pilot.reuse", "r3");
       c.set("sweep.presets", "nopc,fpc05,fpc08");
       c.set("out.cdf", "true");
       return c;
     }},
    {"desk2", "Desk scale: noPC vs FPC_0.8, M=32, MRT, reuse 1",
     [] {
       KeyValueConfig c = desk_base("desk2");
       c.set("bf.criterion", "mrt");
       c.set("pilot.reuse", "r1");
       c.set("sweep.presets", "nopc,fpc08");
       return c;
     }},
    {"desk3", "Desk scale: noPC vs FPC_0.8, M=64, MRT, reuse 3",
     [] {
       KeyValueConfig c = desk_base("desk3");
       c.set("array.ports", "64");
       c.set("bf.criterion", "mrt");
       c.set("pilot.reuse", "r3");
       c.set("sweep.presets", "nopc,fpc08");
       return c;
     }},
    {"desk4", "Desk scale: FPC_0.8 estimated vs perfect CSI, M=32, ZF, reuse 3",
     [] {
       KeyValueConfig c = desk_base("desk4");
       c.set("bf.criterion", "zf");
       c.set("pilot.reuse", "r3");
       c.set("sweep.presets", "fpc08,fpc08_pcsi");
       return c;
     }},
};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const PresetDef& p : kPresets) names.push_back(p.name);
  return names;
}

std::string preset_description(const std::string& name) {
  for (const PresetDef& p : kPresets) {
    if (name == p.name) return p.description;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

KeyValueConfig preset_config(const std::string& name) {
  for (const PresetDef& p : kPresets) {
    if (name == p.name) return p.build();
  }
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace fpcsim
