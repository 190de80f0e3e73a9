#ifndef COXIAN_RNG_HPP
#define COXIAN_RNG_HPP

#include <cmath>
#include <cstdint>

namespace coxian {

// SplitMix64 stream. Platform-independent and cheap to split: (seed, stream)
// fully determine the sequence, so per-path and per-start substreams are
// reproducible.
class SplitMix64 {
public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  // Derive an independent substream for (seed, index).
  static SplitMix64 stream(uint64_t seed, uint64_t index) {
    uint64_t s = mix(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    return SplitMix64(mix(s ^ 0xBF58476D1CE4E5B9ULL));
  }

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform on the open interval (0, 1).
  double next_open01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Inverse-CDF exponential draw; open-interval uniform avoids log(0).
  double next_exponential(double rate) {
    return -std::log(next_open01()) / rate;
  }

private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  uint64_t state_;
};

} // namespace coxian

#endif
