#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "rcaus/types.hpp"

namespace rcaus {

/// Philox4x64-10 counter-based generator. The output is a pure function of
/// (key, counter), so streams are reproducible on any platform.
class Philox4x64 {
 public:
  using Block = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Block generate(Block counter, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B97F4A7C15ULL;
        key[1] += 0xBB67AE8584CAA73BULL;
      }
      const auto [hi0, lo0] = mulhilo(0xD2E7470EE14C6C93ULL, counter[0]);
      const auto [hi1, lo1] = mulhilo(0xCA5A826395121157ULL, counter[2]);
      counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
    }
    return counter;
  }

  /// Stream keyed by (seed, stream); blocks are drawn at counters 0, 1, 2, ...
  Philox4x64(std::uint64_t seed, std::uint64_t stream) : key_{seed, stream} {}

  std::uint64_t next() {
    if (used_ == 4) {
      block_ = generate({counter_++, 0, 0, 0}, key_);
      used_ = 0;
    }
    return block_[used_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal by Box-Muller from two fresh draws (the sine branch is discarded).
  double normal() {
    const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  static std::array<std::uint64_t, 2> mulhilo(std::uint64_t a, std::uint64_t b) {
    __extension__ using u128 = unsigned __int128;
    const u128 p = static_cast<u128>(a) * b;
    return {static_cast<std::uint64_t>(p >> 64), static_cast<std::uint64_t>(p)};
  }

  Key key_;
  std::uint64_t counter_ = 0;
  Block block_{};
  int used_ = 4;
};

}  // namespace rcaus
