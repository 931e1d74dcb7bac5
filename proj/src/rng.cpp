#include "bayesimp/rng.hpp"

#include <cmath>

namespace bayesimp {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::uint64_t seed, std::string_view s) {
  std::uint64_t h = seed ^ 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

RngStream RngStream::root(std::uint64_t seed) { return RngStream(mix64(seed + kGamma)); }

RngStream RngStream::substream(std::string_view name) const {
  return RngStream(mix64(fnv1a(key_, name)));
}

RngStream RngStream::substream(std::string_view name, std::uint64_t index) const {
  return RngStream(mix64(fnv1a(key_, name) + (index + 1) * kGamma));
}

std::uint64_t RngStream::next_u64() { return mix64(key_ + (++counter_) * kGamma); }

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
  // Rejection-free modulo bias is fine at our n << 2^64, but keep it exact.
  const std::uint64_t limit = n * ((~0ull) / n);
  std::uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return v % n;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // Box-Muller; u1 shifted away from 0 so log() is finite.
  const double u1 = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

}  // namespace bayesimp
