#ifndef MINTS_RNG_HPP
#define MINTS_RNG_HPP

#include <cstdint>
#include <random>

#include "mints/math.hpp"

namespace mints {

// Seeded random stream keyed by (master_seed, chain, replication).
// Identical keys give bitwise-identical sequences; distinct keys give
// statistically independent streams. All variate transforms are done
// in-house so sequences do not depend on the standard library's
// distribution implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed, std::uint64_t chain = 0,
                     std::uint64_t replication = 0) {
    std::uint64_t s = splitmix(master_seed ^ splitmix(0x9e3779b97f4a7c15ULL + chain));
    s = splitmix(s ^ splitmix(0xbf58476d1ce4e5b9ULL + replication));
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                      static_cast<std::uint32_t>(chain), static_cast<std::uint32_t>(replication)};
    engine_.seed(seq);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on (0, 1), 53-bit resolution, never returns 0 or 1.
  double uniform() {
    const double u = (next_u64() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-54;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() { return norm_quantile(uniform()); }

  double normal(double mean, double var) { return mean + std::sqrt(var) * normal(); }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
};

// Deterministic per-replication seed derivation for parallel experiment runs.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t experiment,
                                 std::uint64_t replication) {
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return mix(master ^ mix(experiment + 0x51a7bcb9ULL) ^ mix(replication + 0xc2b2ae35ULL));
}

} // namespace mints

#endif
