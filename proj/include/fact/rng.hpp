#ifndef FACT_RNG_HPP
#define FACT_RNG_HPP

#include <array>
#include <cstdint>

namespace fact::rng {

// SplitMix64 step (Steele, Lea, Flood 2014). Used both as a mixer for
// deriving substream seeds and as the seeder for Xoshiro256PlusPlus.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Hash-combines a master seed with stream labels so that every
// (seed, label...) pair yields an independent deterministic substream.
// Used for per-size / per-sample calibration streams and per-trial
// simulation streams; results do not depend on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t seed) {
  std::uint64_t s = seed;
  return splitmix64(s);
}

template <class... Rest>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label, Rest... rest) {
  std::uint64_t s = seed + 0x632be59bd9b4e019ULL * (label + 1);
  return derive_seed(splitmix64(s), rest...);
}

// xoshiro256++ (Blackman & Vigna). Small, fast, and fully specified here
// so streams are reproducible independent of the standard library.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on the open interval (0,1): 53-bit mantissa, offset by half an ulp
  // so 0 and 1 are never returned.
  double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  // Uniform on [0,1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace fact::rng

#endif
