#pragma once

#include <cstdint>

namespace facimean {

// Counter-based generator (SplitMix64 over an incrementing state). A stream is
// fully determined by (seed, stream_id), so Monte Carlo replications can be
// generated in any order, on any number of threads, with identical results.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : state_(mix(seed + 0x9e3779b97f4a7c15ull) ^ mix(stream_id + 0xbf58476d1ce4e5b9ull)) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform on the open interval (0, 1); never returns an exact endpoint, so
  // inverse-CDF transforms stay finite.
  double uniform01() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // UniformRandomBitGenerator interface for <random> distributions.
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ull; }
  result_type operator()() noexcept { return next_u64(); }

 private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace facimean
