#pragma once

#include <cstdint>
#include <random>

namespace queuechan {

/// Purpose tags for the independent random streams of one run. Every
/// stochastic component draws from its own stream, so arrival, service and
/// noise realizations are individually reproducible no matter how the other
/// components consume randomness.
enum class StreamPurpose : std::uint64_t {
  Arrival = 1,
  Service = 2,
  Noise = 3,
  Input = 4,
  Message = 5,
  Codebook = 6,
  Generic = 7,
};

namespace detail {
// SplitMix64; used only to spread (seed, purpose, index) into engine seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// One independent 64-bit random stream, identified by (seed, purpose, index).
/// Identical identifiers always reproduce the identical sequence.
class RngStream {
public:
  RngStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index = 0)
      : eng_(detail::splitmix64(
            detail::splitmix64(seed ^ (static_cast<std::uint64_t>(purpose) << 56)) + index)) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe as a log() argument.
  double uniform01_open() {
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Unbiased uniform integer in [0, n).
  std::uint64_t uniform_below(std::uint64_t n) {
    // rejection over the largest multiple of n
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % n;
  }

private:
  std::mt19937_64 eng_;
};

}  // namespace queuechan
