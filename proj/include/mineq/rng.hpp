#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "mineq/normal.hpp"

namespace mineq {

// Philox 4x32-10: a keyed bijection on 128-bit counters. Every output block
// is a pure function of (key, counter), which is what makes replication- and
// draw-level streams reproducible independent of scheduling.
struct Philox4x32 {
  static std::array<std::uint32_t, 4> block(std::uint64_t key, std::array<std::uint32_t, 4> ctr) {
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t m0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t m1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(m1 >> 32) ^ ctr[1] ^ k0,
             static_cast<std::uint32_t>(m1),
             static_cast<std::uint32_t>(m0 >> 32) ^ ctr[3] ^ k1,
             static_cast<std::uint32_t>(m0)};
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return ctr;
  }
};

// Purpose tags keep the uniform streams used for data generation, multiplier
// weights, and resampling indices disjoint even under a shared seed.
enum class StreamPurpose : std::uint32_t {
  generic = 0,
  dgp_errors = 1,
  mb_weights = 2,
  eb_indices = 3,
  oracle = 4,
};

// Mixes (seed, a, b) into a child seed (splitmix64 finalizer chain).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ b);
}

// Deterministic random stream keyed by (seed, purpose, stream_id). Output at
// any position depends only on the key material and the position, never on
// which thread asks for it.
class RngStream {
 public:
  RngStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t stream_id = 0)
      : key_(seed),
        prefix_{static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(stream_id),
                static_cast<std::uint32_t>(stream_id >> 32)} {}

  std::uint32_t next_u32() {
    if (lane_ == 4) {
      buf_ = Philox4x32::block(key_, {prefix_[0], prefix_[1], prefix_[2], block_++});
      lane_ = 0;
    }
    return buf_[lane_++];
  }

  // Uniform in the open interval (0,1), 53 usable bits; never returns an
  // endpoint, so inverse-CDF transforms stay finite.
  double u01() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    const std::uint64_t bits = (hi << 32) | lo;
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the inverse CDF; see normal_quantile for accuracy.
  double normal() { return normal_quantile(u01()); }

  // Student t with 4 degrees of freedom through the exact polar transform
  // sqrt(nu (u^{-2/nu} - 1)) cos(2 pi v). Consumes exactly two uniforms per
  // variate; at nu = 4 the radial part reduces to 1/sqrt(u).
  double t4() {
    const double u = u01();
    const double v = u01();
    return std::sqrt(4.0 * (1.0 / std::sqrt(u) - 1.0)) * std::cos(2.0 * kPi * v);
  }

  // Uniform on (-sqrt(3), sqrt(3)): mean 0, variance 1.
  double uniform_sym_sqrt3() { return kSqrt3 * (2.0 * u01() - 1.0); }

  // Unbiased integer in [0, n) by rejection.
  std::uint32_t uniform_index(std::uint32_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
    const std::uint32_t lim = (~n + 1u) % n;  // 2^32 mod n
    std::uint32_t x = next_u32();
    while (x < lim) x = next_u32();
    return x % n;
  }

 private:
  std::uint64_t key_;
  std::array<std::uint32_t, 3> prefix_;
  std::array<std::uint32_t, 4> buf_{};
  std::uint32_t block_ = 0;
  int lane_ = 4;
};

}  // namespace mineq
