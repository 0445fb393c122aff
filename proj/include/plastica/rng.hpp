#pragma once

#include <cmath>
#include <cstdint>

namespace plastica {

// splitmix64 finalizer. Public-domain mixing function.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Uniform draw in (0,1) addressed by (seed, index). There is no sequential
// generator state, so the value of draw i never depends on which draws were
// made before it or on which thread asked for it.
inline double counter_uniform(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t z =
      splitmix64(splitmix64(seed) + 0x9e3779b97f4a7c15ull * (index + 1));
  return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal addressed by (seed, index), via Box-Muller.
inline double counter_normal(std::uint64_t seed, std::uint64_t index) {
  const double u1 = counter_uniform(seed, 2 * index);
  const double u2 = counter_uniform(seed, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(6.28318530717958647692528676655900577 * u2);
}

}  // namespace plastica
