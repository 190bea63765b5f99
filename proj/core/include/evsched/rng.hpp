#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace evsched {

// All randomness in the library flows through this counter-based splitmix64
// stream. Distributions are implemented explicitly (not via <random>
// distribution classes, whose output is implementation-defined) so that a
// given seed produces the same bytes on every platform.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Derives an independent substream seed from a base seed and a tag path,
// e.g. derive_seed(seed, {kTagEv, household_id, ev_id, day}).
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = mix64(base + 0x9e3779b97f4a7c15ULL);
  for (std::uint64_t t : tags) s = mix64(s ^ mix64(t + 0x9e3779b97f4a7c15ULL));
  return s;
}

// Stream tags for the seed paths used across the library. Distinct constants
// keep substreams independent even when their numeric arguments collide.
namespace seed_tag {
inline constexpr std::uint64_t kResidential = 0x01;
inline constexpr std::uint64_t kEvCount = 0x02;
inline constexpr std::uint64_t kEvParams = 0x03;
inline constexpr std::uint64_t kEvDay = 0x04;
inline constexpr std::uint64_t kMask = 0x05;
inline constexpr std::uint64_t kSizeSubset = 0x06;
inline constexpr std::uint64_t kParticipants = 0x07;
inline constexpr std::uint64_t kCostTable = 0x08;
}  // namespace seed_tag

class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive on both ends; unbiased via rejection.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t n = hi - lo + 1;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t u;
    do {
      u = next_u64();
    } while (u >= limit);
    return lo + u % n;
  }

  // Box-Muller with a cached spare deviate.
  double normal(double mean, double sd) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + sd * spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return mean + sd * r * std::cos(a);
  }

  // Normal truncated to [lo, hi] by rejection, falling back to clamping
  // after a bounded number of tries so the draw always terminates.
  double truncated_normal(double mean, double sd, double lo, double hi) {
    for (int i = 0; i < 256; ++i) {
      double x = normal(mean, sd);
      if (x >= lo && x <= hi) return x;
    }
    double x = normal(mean, sd);
    return x < lo ? lo : (x > hi ? hi : x);
  }

  // Knuth's product method; adequate for the small means used here.
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace evsched
