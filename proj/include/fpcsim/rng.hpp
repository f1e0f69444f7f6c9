// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace fpcsim {

/// Purpose tags for stream derivation. Every random draw in the simulator
/// comes from a stream keyed by (master_seed, tag, drop, entity), so any
/// quantity can be regenerated in isolation and results never depend on
/// evaluation order or thread count.
enum class StreamTag : std::uint64_t {
  user_drop = 0x01,
  los = 0x02,
  shadowing = 0x03,
  clusters = 0x04,
  pilot_noise = 0x05,
};

namespace detail {

// splitmix64 finalizer (Steele/Lea/Flood); bijective on 64-bit words.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

/// Counter-based random stream: output i is mix64(key + i*golden), i.e. a
/// bijective hash of a Weyl counter. The key is itself a hash chain over
/// (master_seed, tag, drop, entity). No global state, no shared state.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, StreamTag tag, std::uint64_t drop,
            std::uint64_t entity)
      : state_(derive_key(master_seed, tag, drop, entity)) {}

  static std::uint64_t derive_key(std::uint64_t master_seed, StreamTag tag,
                                  std::uint64_t drop, std::uint64_t entity) {
    std::uint64_t k = detail::mix64(master_seed + detail::kGolden);
    k = detail::mix64(k ^ (static_cast<std::uint64_t>(tag) * detail::kGolden));
    k = detail::mix64(k + drop * 0xd6e8feb86659fd93ULL);
    k = detail::mix64(k + entity * 0xa0761d6478bd642fULL);
    return k;
  }

  std::uint64_t next_u64() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // 64-bit multiply-shift; bias is negligible for the n used here.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (no cached second value, so the draw
  /// count per call is fixed and streams stay reproducible).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Exponential with the given mean.
  double exponential(double mean) {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return -mean * std::log(u);
  }

  /// Zero-mean Laplacian with the given standard deviation.
  double laplacian(double stddev) {
    const double b = stddev / std::sqrt(2.0);
    double u = uniform() - 0.5;
    if (u <= -0.5) u = -0.5 + 0x1.0p-53;
    return (u < 0.0 ? b * std::log(1.0 + 2.0 * u) : -b * std::log(1.0 - 2.0 * u));
  }

  /// Circularly-symmetric complex Gaussian, E|z|^2 = variance.
  std::complex<double> cnormal(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal(0.0, s);
    const double im = normal(0.0, s);
    return {re, im};
  }

  std::complex<double> unit_phase() {
    const double ph = uniform(0.0, 2.0 * M_PI);
    return {std::cos(ph), std::sin(ph)};
  }

 private:
  std::uint64_t state_;
};

}  // namespace fpcsim
