#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <vector>

namespace swin {

// Integer-coordinate point in {1,...,Delta}^d.  All distance work keeps the
// squared value as an exact integer and only takes the square root at the
// last moment.
struct Pt {
  std::vector<std::int64_t> c;
  bool operator==(const Pt&) const = default;
  auto operator<=>(const Pt&) const = default;
};

inline std::int64_t sqdist(const Pt& a, const Pt& b) {
  std::int64_t s = 0;
  for (std::size_t j = 0; j < a.c.size(); ++j) {
    const std::int64_t diff = a.c[j] - b.c[j];
    s += diff * diff;
  }
  return s;
}

inline double dist(const Pt& a, const Pt& b) {
  return std::sqrt(static_cast<double>(sqdist(a, b)));
}

// Componentwise snap to the grid of side mu: floor(x / mu) per coordinate,
// rescaled.  The floor indices themselves double as bucket keys.
inline std::vector<std::int64_t> grid_index(const Pt& x, double mu) {
  std::vector<std::int64_t> idx(x.c.size());
  for (std::size_t j = 0; j < x.c.size(); ++j)
    idx[j] = static_cast<std::int64_t>(std::floor(static_cast<double>(x.c[j]) / mu));
  return idx;
}

inline std::vector<double> grid_snap(const Pt& x, double mu) {
  std::vector<double> snapped(x.c.size());
  const auto idx = grid_index(x, mu);
  for (std::size_t j = 0; j < x.c.size(); ++j)
    snapped[j] = static_cast<double>(idx[j]) * mu;
  return snapped;
}

}  // namespace swin
