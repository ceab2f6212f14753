#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>

namespace rasc {

namespace detail {

// splitmix64 finalizer, used to decorrelate derived stream seeds.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Deterministic random source. All sampling goes through explicit, portable
// transforms (rejection sampling, Box-Muller) so that a given seed produces
// the same stream on every platform; std::uniform_*_distribution and
// std::normal_distribution are implementation-defined and must not be used
// anywhere results are persisted.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  // Derives an independent stream from a master seed and a tag path, e.g.
  // Rng::stream(seed, {kTagFrame, frame_idx}). Identical paths give identical
  // streams regardless of how work is split across threads.
  static Rng stream(uint64_t master, std::initializer_list<uint64_t> tags) {
    uint64_t h = detail::mix64(master);
    for (uint64_t t : tags) h = detail::mix64(h ^ detail::mix64(t));
    return Rng(h);
  }

  uint64_t next_u64() { return eng_(); }

  // Uniform integer in [0, bound) without modulo bias.
  uint32_t uniform_u32(uint32_t bound) {
    const uint64_t span = uint64_t(bound);
    const uint64_t limit = (~uint64_t(0) / span) * span;
    uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return uint32_t(r % span);
  }

  // Uniform double in [0, 1) with 53-bit resolution.
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; second value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * M_PI * uniform01();
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
  }

  // Circularly symmetric complex normal with total variance var
  // (var/2 per real dimension).
  std::complex<double> cnormal(double var) {
    const double s = std::sqrt(var / 2.0);
    const double a = normal();
    const double b = normal();
    return {s * a, s * b};
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stream tag namespace: keep values unique across the codebase.
enum StreamTag : uint64_t {
  kTagInterleaver = 1,
  kTagFrameSource = 2,
  kTagFrameNoise = 3,
  kTagFrameCoset = 4,
  kTagMcdeChannel = 5,
  kTagMcdeSelect = 6,
  kTagMcdeDecision = 7,
  kTagMcdeRun = 8,
};

}  // namespace rasc
