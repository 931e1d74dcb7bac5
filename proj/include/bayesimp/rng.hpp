#pragma once

#include <cstdint>
#include <string_view>

namespace bayesimp {

// Counter-based pseudo-random stream, identical output on every platform.
//
// The generator is the SplitMix64 finalizer applied to key + counter*GAMMA:
//   z = key + counter * 0x9E3779B97F4A7C15
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   out = z ^ (z >> 31)
// Substreams are keyed by FNV-1a hashing a stream name into the parent key,
// so every component of an experiment draws from its own independent stream
// regardless of the order other components consume randomness.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  // Root stream for a user-facing seed.
  static RngStream root(std::uint64_t seed);

  // Independent child stream, e.g. stream.substream("bo").substream("rep-3").
  RngStream substream(std::string_view name) const;
  RngStream substream(std::string_view name, std::uint64_t index) const;

  std::uint64_t next_u64();

  // Uniform on [0,1) from the top 53 bits.
  double uniform01();
  double uniform(double lo, double hi);
  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n);

  // Standard normal via Box-Muller; generates pairs, caches the second.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace bayesimp
