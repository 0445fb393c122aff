#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "plastica/core.hpp"

namespace plastica {

// Van der Corput radical inverse in a prime base.
inline double radical_inverse(std::uint64_t index, unsigned base) {
  const double inv = 1.0 / base;
  double f = inv, r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

inline constexpr unsigned kHaltonPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                             23, 29, 31, 37, 41, 43, 47, 53};

// Halton point in (0,1)^dim, index >= 1. prime_offset selects which bases to
// use so that independent sample streams do not share coordinates.
inline Vec halton_point(std::uint64_t index, std::size_t dim,
                        std::size_t prime_offset = 0) {
  Vec p(dim);
  for (std::size_t k = 0; k < dim; ++k)
    p[k] = radical_inverse(index, kHaltonPrimes[prime_offset + k]);
  return p;
}

// Direction on the unit sphere addressed by two low-discrepancy coordinates.
inline Vec sphere_direction(double u1, double u2, std::size_t d) {
  if (d == 1) return Vec{u1 < 0.5 ? -1.0 : 1.0};
  if (d == 2) {
    const double th = 2.0 * 3.14159265358979323846 * u1;
    return Vec{std::cos(th), std::sin(th)};
  }
  // d == 3, area-preserving cylindrical map
  const double z = 1.0 - 2.0 * u1;
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double th = 2.0 * 3.14159265358979323846 * u2;
  return Vec{r * std::cos(th), r * std::sin(th), z};
}

// Deterministic cloud of n points in the closed ball of the given radius:
// low-discrepancy interior points with every fourth point placed exactly on
// the boundary sphere (extremal points dominate evolved images). Prefixes
// are nested: the first n points of a larger cloud equal the n-point cloud.
inline std::vector<Vec> ball_cloud(std::size_t d, double radius,
                                   std::size_t n) {
  std::vector<Vec> pts;
  pts.reserve(n);
  std::size_t shell_ordinal = 0;
  for (std::uint64_t i = 1; pts.size() < n; ++i) {
    const Vec u = halton_point(i, 3);
    if (i % 4 == 0) {
      Vec dir = (d == 1) ? Vec{shell_ordinal % 2 == 0 ? 1.0 : -1.0}
                         : sphere_direction(u[0], u[1], d);
      ++shell_ordinal;
      pts.push_back(scaled(dir, radius));
      continue;
    }
    if (d == 1) {
      pts.push_back(Vec{radius * (2.0 * u[0] - 1.0)});
    } else {
      const Vec dir = sphere_direction(u[0], u[1], d);
      const double r = radius * std::pow(u[2], 1.0 / static_cast<double>(d));
      pts.push_back(scaled(dir, r));
    }
  }
  return pts;
}

// Halton samples in the axis-aligned box [lo_i, hi_i]. Nested prefixes.
inline std::vector<Vec> box_cloud(const Vec& lo, const Vec& hi, std::size_t n,
                                  std::size_t prime_offset = 0) {
  std::vector<Vec> pts;
  pts.reserve(n);
  for (std::uint64_t i = 1; i <= n; ++i) {
    const Vec u = halton_point(i, lo.size(), prime_offset);
    Vec p(lo.size());
    for (std::size_t k = 0; k < lo.size(); ++k)
      p[k] = lo[k] + (hi[k] - lo[k]) * u[k];
    pts.push_back(std::move(p));
  }
  return pts;
}

// Samples on the spherical shell r in [r_lo, r_hi]; nested prefixes.
inline std::vector<Vec> shell_cloud(std::size_t d, double r_lo, double r_hi,
                                    std::size_t n) {
  std::vector<Vec> pts;
  pts.reserve(n);
  for (std::uint64_t i = 1; pts.size() < n; ++i) {
    const Vec u = halton_point(i, 3);
    const Vec dir = sphere_direction(u[0], u[1], d);
    const double r = r_lo + (r_hi - r_lo) * u[2];
    pts.push_back(scaled(dir, r));
  }
  return pts;
}

}  // namespace plastica
