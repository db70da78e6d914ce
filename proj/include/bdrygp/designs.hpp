#ifndef BDRYGP_DESIGNS_HPP
#define BDRYGP_DESIGNS_HPP

#include "bdrygp/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

namespace bdrygp {

using MultiIndex = std::vector<int>;

inline int index_sum(const MultiIndex& a) {
  int s = 0;
  for (int v : a) s += v;
  return s;
}

inline int index_max(const MultiIndex& a) {
  int m = 0;
  for (int v : a) m = std::max(m, v);
  return m;
}

/// One coordinate of a grid point as an exact dyadic rational
/// beta * 2^{-level}. Canonical form has beta odd or level 0, so each
/// rational has exactly one representation and dedup needs no floats.
struct DyadicCoord {
  int level = 0;
  std::int64_t index = 0;

  DyadicCoord() = default;
  DyadicCoord(int lvl, std::int64_t beta) : level(lvl), index(beta) {
    if (level < 0 || index < 0 || index > (std::int64_t{1} << level))
      throw std::invalid_argument("DyadicCoord: index outside [0, 2^level]");
    while (level > 0 && index % 2 == 0) {
      index /= 2;
      --level;
    }
  }

  double value() const { return std::ldexp(static_cast<double>(index), -level); }

  bool operator==(const DyadicCoord& o) const {
    return level == o.level && index == o.index;
  }
  // exact rational comparison
  bool operator<(const DyadicCoord& o) const {
    const int m = std::max(level, o.level);
    return (index << (m - level)) < (o.index << (m - o.level));
  }
};

struct DyadicPoint {
  std::vector<DyadicCoord> coords;

  DyadicPoint() = default;
  explicit DyadicPoint(std::vector<DyadicCoord> c) : coords(std::move(c)) {}

  int dim() const { return static_cast<int>(coords.size()); }

  Point values() const {
    Point x(coords.size());
    for (std::size_t j = 0; j < coords.size(); ++j) x[j] = coords[j].value();
    return x;
  }

  bool operator==(const DyadicPoint& o) const { return coords == o.coords; }
  bool operator<(const DyadicPoint& o) const {
    for (std::size_t j = 0; j < coords.size(); ++j) {
      if (coords[j] < o.coords[j]) return true;
      if (o.coords[j] < coords[j]) return false;
    }
    return false;
  }
};

/// Index set B_alpha in one dimension: beta runs from 1 if the left
/// boundary is known (else 0) to 2^alpha_j minus 1 if the right boundary
/// is known. May be empty (beta_min > beta_max) at level 0 with both
/// boundaries known.
inline std::pair<std::int64_t, std::int64_t> index_range(
    int alpha_j, int j, const BoundaryConfig& bounds) {
  if (alpha_j < 0) throw std::invalid_argument("index_range: negative level");
  const std::int64_t lo = bounds.left(j) ? 1 : 0;
  const std::int64_t hi =
      (std::int64_t{1} << alpha_j) - (bounds.right(j) ? 1 : 0);
  return {lo, hi};
}

struct FullGrid {
  MultiIndex alpha;
  BoundaryConfig bounds;
  std::vector<DyadicPoint> points;  // lexicographic by coordinate value

  std::vector<double> mesh() const {
    std::vector<double> h(alpha.size());
    for (std::size_t j = 0; j < alpha.size(); ++j)
      h[j] = std::ldexp(1.0, -alpha[j]);
    return h;
  }
};

inline FullGrid full_grid(const MultiIndex& alpha,
                          const BoundaryConfig& bounds) {
  const int d = bounds.dim();
  if (static_cast<int>(alpha.size()) != d)
    throw std::invalid_argument("full_grid: alpha/bounds dimension mismatch");
  FullGrid g{alpha, bounds, {}};

  std::vector<std::pair<std::int64_t, std::int64_t>> ranges(d);
  std::size_t count = 1;
  for (int j = 0; j < d; ++j) {
    ranges[j] = index_range(alpha[j], j, bounds);
    if (ranges[j].first > ranges[j].second) return g;  // empty grid
    count *= static_cast<std::size_t>(ranges[j].second - ranges[j].first + 1);
  }

  g.points.reserve(count);
  std::vector<std::int64_t> beta(d);
  for (int j = 0; j < d; ++j) beta[j] = ranges[j].first;
  while (true) {
    std::vector<DyadicCoord> c(d);
    for (int j = 0; j < d; ++j) c[j] = DyadicCoord(alpha[j], beta[j]);
    g.points.emplace_back(std::move(c));
    int j = d - 1;
    while (j >= 0 && beta[j] == ranges[j].second) {
      beta[j] = ranges[j].first;
      --j;
    }
    if (j < 0) break;
    ++beta[j];
  }
  return g;
}

inline std::size_t full_grid_size(const MultiIndex& alpha,
                                  const BoundaryConfig& bounds) {
  std::size_t count = 1;
  for (int j = 0; j < bounds.dim(); ++j) {
    auto [lo, hi] = index_range(alpha[j], j, bounds);
    if (lo > hi) return 0;
    count *= static_cast<std::size_t>(hi - lo + 1);
  }
  return count;
}

/// Calls visit(alpha) for every d-tuple of non-negative integers with
/// component sum exactly `total`.
template <typename Visitor>
void for_each_composition(int total, int d, Visitor&& visit) {
  MultiIndex alpha(d, 0);
  // recursive lambda over remaining budget
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == d - 1) {
      alpha[pos] = remaining;
      visit(const_cast<const MultiIndex&>(alpha));
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      alpha[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  rec(rec, 0, total);
}

struct SparseGrid {
  int level = 0;
  int dim = 0;
  BoundaryConfig bounds;
  std::vector<DyadicPoint> points;  // deduplicated, lexicographic
  std::vector<MultiIndex> component_grids;
};

/// Union of full grids X_alpha over k <= |alpha| <= k+d-1, deduplicated
/// via canonical dyadic form.
inline SparseGrid sparse_grid(int k, int d, const BoundaryConfig& bounds) {
  if (k < 1) throw std::invalid_argument("sparse_grid: level k must be >= 1");
  if (d < 1 || bounds.dim() != d)
    throw std::invalid_argument("sparse_grid: bad dimension");
  SparseGrid sg;
  sg.level = k;
  sg.dim = d;
  sg.bounds = bounds;

  std::set<DyadicPoint> acc;
  for (int s = k; s <= k + d - 1; ++s) {
    for_each_composition(s, d, [&](const MultiIndex& alpha) {
      sg.component_grids.push_back(alpha);
      FullGrid g = full_grid(alpha, bounds);
      for (auto& p : g.points) acc.insert(std::move(p));
    });
  }
  sg.points.assign(acc.begin(), acc.end());
  return sg;
}

}  // namespace bdrygp

#endif  // BDRYGP_DESIGNS_HPP
