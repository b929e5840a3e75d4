#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gacl {

// Deterministic random stream used everywhere in the workbench.
//
// The engine is std::mt19937_64 (its output sequence is pinned by the
// standard, so trajectories are reproducible across platforms for a given
// seed). Uniform doubles take the top 53 bits of one engine draw. Gaussians
// use the Marsaglia polar-rejection transform of uniform pairs, with the
// spare value cached, so the mapping from seed to trajectory is fixed by
// this class alone and never depends on libstdc++ distribution internals.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), eng_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer on [0, n) by rejection.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via polar rejection: draw (u, v) uniform on (-1, 1)^2,
  // accept when s = u^2 + v^2 is in (0, 1), return u * sqrt(-2 ln s / s)
  // and cache the v-branch for the next call.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  double gaussian(double mu, double sigma) { return mu + sigma * gaussian(); }

  // Child stream keyed on the original seed plus tags. Derivation uses the
  // seed, not the current engine state, so the result is independent of how
  // much the parent has been consumed (replicates and conditions never
  // share a stream, regardless of evaluation order).
  RandomStream derive(std::uint64_t a, std::uint64_t b = 0) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// splitmix64 finalizer, the usual seed-mixing primitive.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
  std::uint64_t h = mix64(master ^ mix64(a));
  h = mix64(h ^ mix64(b ^ 0x5851f42d4c957f2dULL));
  return h;
}

inline RandomStream RandomStream::derive(std::uint64_t a,
                                         std::uint64_t b) const {
  return RandomStream(derive_seed(seed_, a, b));
}

}  // namespace gacl
