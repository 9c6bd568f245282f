#pragma once

#include <cstdint>

namespace torpath {

// Deterministic counter-based uniform source. A (seed, position) pair fully
// determines every draw, and split() derives a stream whose outputs never
// overlap the parent's, so concurrent consumers stay replayable as long as
// each one owns its own lane.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : key_(mix(seed ^ kSalt)) {}

  // Uniform in [0, 1), 53 significant bits, never returns 1.0.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  std::uint64_t next_u64() {
    position_ += 1;
    return mix(key_ + kGamma * position_);
  }

  // Child stream addressed by lane; independent of the parent's position.
  RandomStream split(std::uint64_t lane) const {
    return RandomStream(FromKey{}, mix(key_ ^ mix(lane + kGamma)));
  }

  std::uint64_t position() const noexcept { return position_; }

 private:
  struct FromKey {};
  RandomStream(FromKey, std::uint64_t key) : key_(key) {}

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kSalt = 0xD1B54A32D192ED03ULL;

  std::uint64_t key_ = 0;
  std::uint64_t position_ = 0;
};

}  // namespace torpath
