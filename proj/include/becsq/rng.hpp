#pragma once

// Counter-based Philox4x32-10. A stream is addressed by (seed, trajectory,
// stream id); draws within a stream are addressed by an index, so any
// subset of random numbers can be regenerated independently.

#include <array>
#include <cmath>
#include <cstdint>

#include "becsq/constants.hpp"

namespace becsq {

class Philox {
 public:
  using Block = std::array<std::uint32_t, 4>;

  Philox(std::uint64_t seed, std::uint64_t trajectory, std::uint32_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        trajectory_(trajectory),
        stream_(stream) {}

  /// Four 32-bit words for counter `index`.
  Block block(std::uint32_t index) const {
    Block ctr{index, stream_, static_cast<std::uint32_t>(trajectory_), static_cast<std::uint32_t>(trajectory_ >> 32)};
    std::array<std::uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

  /// Two independent standard normals (Box-Muller) for counter `index`.
  std::array<double, 2> normal_pair(std::uint32_t index) const {
    const Block b = block(index);
    const double u1 = to_open_unit(b[0], b[1]);
    const double u2 = to_open_unit(b[2], b[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * constants::pi * u2;
    return {r * std::cos(angle), r * std::sin(angle)};
  }

 private:
  // 53-bit uniform on (0, 1].
  static double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t trajectory_;
  std::uint32_t stream_;
};

}  // namespace becsq
