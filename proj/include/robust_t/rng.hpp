#pragma once

// Counter-based random streams.
//
// Philox4x64-10 maps (counter, key) to four 64-bit words with no internal
// state, so any stream can be addressed directly by its key. Monte Carlo work
// is split into blocks, each keyed by (seed, domain, n, block index); the
// values a block draws do not depend on which thread runs it or when.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace robust_t {

class Philox4x64 {
 public:
  using result_type = std::uint64_t;
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  explicit Philox4x64(Key key, Counter counter = {0, 0, 0, 0}) : key_(key), counter_(counter) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (position_ == 4) {
      block_ = generate(counter_, key_);
      increment(counter_);
      position_ = 0;
    }
    return block_[position_++];
  }

  /// The bijection itself: ten rounds over one counter block.
  static Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B97F4A7C15ULL;
        key[1] += 0xBB67AE8584CAA73BULL;
      }
      const unsigned __int128 p0 = static_cast<unsigned __int128>(0xD2E7470EE14C6C93ULL) * ctr[0];
      const unsigned __int128 p1 = static_cast<unsigned __int128>(0xCA5A826395121157ULL) * ctr[2];
      const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
      const auto lo0 = static_cast<std::uint64_t>(p0);
      const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
      const auto lo1 = static_cast<std::uint64_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static void increment(Counter& c) {
    for (auto& word : c) {
      if (++word != 0) break;
    }
  }

  Key key_;
  Counter counter_;
  Counter block_{};
  int position_ = 4;
};

/// Stream namespaces, kept apart in the top byte of the second key word.
enum class StreamDomain : std::uint64_t {
  TableGeneration = 1,
  PowerStudy = 2,
  Diagnostics = 3,
};

/// Key for the stream of (domain, n, block). n < 2^16 and block < 2^40.
inline Philox4x64::Key stream_key(std::uint64_t seed, StreamDomain domain, std::uint64_t n,
                                  std::uint64_t block) {
  return {seed, (static_cast<std::uint64_t>(domain) << 56) | ((n & 0xFFFFULL) << 40) |
                    (block & 0xFFFFFFFFFFULL)};
}

/// Uniform and standard-normal variates from one Philox stream. The normal
/// transform is Box-Muller written out here, so draws are identical on every
/// standard library.
class RandomStream {
 public:
  explicit RandomStream(Philox4x64::Key key) : engine_(key) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  Philox4x64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace robust_t
