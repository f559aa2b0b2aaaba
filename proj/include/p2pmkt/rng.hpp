// Seeded RNG used by scenario generation and schedule construction.
// The uniform helpers bypass std::uniform_*_distribution so the streams do
// not depend on the standard library implementation.
#pragma once

#include <cstdint>
#include <random>

namespace p2pmkt {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream id for (seed, stream), e.g. one per scenario index.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x6a09e667f3bcc909ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // in [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // inclusive bounds; modulo bias is irrelevant at simulation ranges
  long uniform_int(long lo, long hi) {
    return lo + static_cast<long>(gen_() %
                                  static_cast<std::uint64_t>(hi - lo + 1));
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace p2pmkt
