#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

namespace vcoh {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based generator keyed by (master_seed, stream_id).
//
// Output n of a stream is mix64(key + (n + 1) * golden), i.e. SplitMix64
// started from a key derived by hashing both identifiers. Any draw of any
// stream is a pure function of (master_seed, stream_id, n), so trajectories
// can be generated in any order on any worker.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  StreamRng(std::uint64_t master_seed, std::uint64_t stream_id)
      : state_(mix64(mix64(master_seed ^ 0x6A09E667F3BCC909ULL) +
                     mix64(stream_id + 0xBB67AE8584CAA73BULL) * kGolden)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform_phase() { return 2.0 * std::numbers::pi * uniform(); }

  // Exponential with the given mean.
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  double normal() { return normal_(*this); }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  std::uint64_t state_;
  std::normal_distribution<double> normal_;
};

}  // namespace vcoh
