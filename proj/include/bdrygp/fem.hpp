#ifndef BDRYGP_FEM_HPP
#define BDRYGP_FEM_HPP

#include "bdrygp/boundary.hpp"
#include "bdrygp/designs.hpp"
#include "bdrygp/gp.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace bdrygp {

/// 1-d piecewise-linear basis factor. Levels >= 1 are the usual hat
/// bumps; level 0 carries the linear nodal functions x (beta = 1) and
/// 1 - x (beta = 0).
inline double hat1d(int level, std::int64_t beta, double x) {
  if (level < 0 || beta < 0 || beta > (std::int64_t{1} << level))
    throw std::domain_error("hat1d: invalid basis index");
  if (level == 0) return beta == 1 ? x : 1.0 - x;
  const double h = std::ldexp(1.0, -level);
  const double t = 1.0 - std::abs(x - static_cast<double>(beta) * h) / h;
  return t > 0.0 ? t : 0.0;
}

inline double hat(const MultiIndex& alpha, const std::vector<std::int64_t>& beta,
                  const Point& x) {
  if (alpha.size() != beta.size() || alpha.size() != x.size())
    throw std::domain_error("hat: dimension mismatch");
  double v = 1.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    v *= hat1d(alpha[j], beta[j], x[j]);
    if (v == 0.0) return 0.0;
  }
  return v;
}

/// Full-grid Lagrange interpolant: locates the containing cell (edge
/// queries go to the left/lower cell) and sums the at most 2^d corner
/// contributions, with zero extension on known-boundary faces.
inline double lagrange_full(const Evaluator& f, const MultiIndex& alpha,
                            const BoundaryConfig& bounds, const Point& x) {
  const int d = bounds.dim();
  check_in_unit_cube(x, d, "lagrange_full");
  if (static_cast<int>(alpha.size()) != d)
    throw std::domain_error("lagrange_full: alpha dimension mismatch");

  // per-dimension lists of (beta, hat weight) for in-range corners
  std::vector<std::vector<std::pair<std::int64_t, double>>> corners(d);
  for (int j = 0; j < d; ++j) {
    const std::int64_t cells = std::int64_t{1} << alpha[j];
    const double t = x[j] * static_cast<double>(cells);
    std::int64_t cell = static_cast<std::int64_t>(std::ceil(t)) - 1;
    cell = std::max<std::int64_t>(0, std::min(cell, cells - 1));
    const auto [lo, hi] = index_range(alpha[j], j, bounds);
    for (std::int64_t b : {cell, cell + 1}) {
      if (b < lo || b > hi) continue;  // zero extension past known boundaries
      const double w = hat1d(alpha[j], b, x[j]);
      corners[j].push_back({b, w});
    }
  }

  double sum = 0.0;
  std::vector<std::size_t> pick(d, 0);
  while (true) {
    double w = 1.0;
    Point p(d);
    bool degenerate = false;
    for (int j = 0; j < d; ++j) {
      if (corners[j].empty()) {
        degenerate = true;
        break;
      }
      const auto& [b, wj] = corners[j][pick[j]];
      w *= wj;
      p[j] = std::ldexp(static_cast<double>(b), -alpha[j]);
    }
    if (degenerate) break;
    if (w != 0.0) sum += w * f(p);
    int j = d - 1;
    while (j >= 0 && pick[j] + 1 == corners[j].size()) {
      pick[j] = 0;
      --j;
    }
    if (j < 0) break;
    ++pick[j];
  }
  return sum;
}

/// Caches evaluations of an expensive function at grid points; the
/// stencils revisit shared points heavily.
class MemoizedFn {
 public:
  explicit MemoizedFn(Evaluator f) : f_(std::move(f)) {}
  double operator()(const Point& x) const {
    auto it = cache_.find(x);
    if (it != cache_.end()) return it->second;
    const double v = f_(x);
    cache_.emplace(x, v);
    return v;
  }
  std::size_t evaluations() const { return cache_.size(); }

 private:
  Evaluator f_;
  mutable std::map<Point, double> cache_;
};

/// Hierarchical surplus c_{alpha,beta}: tensor-product stencil
/// [-1/2, 1, -1/2] at spacing 2^{-alpha_j} for levels >= 1 and the
/// two-point difference (node minus opposite endpoint) at level 0.
inline double surplus(const Evaluator& f, const MultiIndex& alpha,
                      const std::vector<std::int64_t>& beta,
                      const BoundaryConfig& bounds) {
  const int d = bounds.dim();
  if (static_cast<int>(alpha.size()) != d || beta.size() != alpha.size())
    throw std::domain_error("surplus: dimension mismatch");

  std::vector<std::pair<Point, double>> stencil;
  stencil.push_back({Point{}, 1.0});
  for (int j = 0; j < d; ++j) {
    std::vector<std::pair<double, double>> taps;  // (coordinate, weight)
    if (alpha[j] >= 1) {
      const double h = std::ldexp(1.0, -alpha[j]);
      const double c = static_cast<double>(beta[j]) * h;
      taps = {{c, 1.0}, {c - h, -0.5}, {c + h, -0.5}};
    } else {
      const double node = static_cast<double>(beta[j]);
      taps = {{node, 1.0}, {1.0 - node, -1.0}};
    }
    std::vector<std::pair<Point, double>> next;
    next.reserve(stencil.size() * taps.size());
    for (const auto& [p, w] : stencil)
      for (const auto& [c, tw] : taps) {
        Point q = p;
        q.push_back(c);
        next.push_back({std::move(q), w * tw});
      }
    stencil = std::move(next);
  }

  double c = 0.0;
  for (const auto& [p, w] : stencil) {
    for (double v : p)
      if (!(v >= 0.0 && v <= 1.0))
        throw std::logic_error("surplus: stencil point left [0,1]^d");
    // stencil taps on known-boundary faces read the centered f, which is 0
    // there; this matches the zero extension used by lagrange_full
    if (is_on_known_boundary(p, bounds)) continue;
    c += w * f(p);
  }
  return c;
}

/// Per-dimension hierarchical index set: odd beta for levels >= 1, the
/// boundary-filtered endpoints {0,1} at level 0.
inline std::vector<std::int64_t> hierarchical_indices(
    int level, int j, const BoundaryConfig& bounds) {
  std::vector<std::int64_t> out;
  if (level == 0) {
    const auto [lo, hi] = index_range(0, j, bounds);
    for (std::int64_t b = lo; b <= hi; ++b) out.push_back(b);
  } else {
    for (std::int64_t b = 1; b < (std::int64_t{1} << level); b += 2)
      out.push_back(b);
  }
  return out;
}

/// Hierarchical surplus coefficients over all alpha with
/// 0 <= |alpha| <= k+d-1; evaluation afterwards is pure.
class SurplusSet {
 public:
  struct Entry {
    MultiIndex alpha;
    std::vector<std::int64_t> beta;
    double coeff;
  };

  SurplusSet(const Evaluator& f, int k, const BoundaryConfig& bounds)
      : level_(k), bounds_(bounds) {
    if (k < 1) throw std::invalid_argument("SurplusSet: level k must be >= 1");
    const int d = bounds.dim();
    MemoizedFn fc(f);
    for (int s = 0; s <= k + d - 1; ++s) {
      for_each_composition(s, d, [&](const MultiIndex& alpha) {
        std::vector<std::vector<std::int64_t>> per_dim(d);
        for (int j = 0; j < d; ++j) {
          per_dim[j] = hierarchical_indices(alpha[j], j, bounds);
          if (per_dim[j].empty()) return;
        }
        std::vector<std::size_t> pick(d, 0);
        std::vector<std::int64_t> beta(d);
        while (true) {
          for (int j = 0; j < d; ++j) beta[j] = per_dim[j][pick[j]];
          entries_.push_back({alpha, beta,
                              surplus([&fc](const Point& p) { return fc(p); },
                                      alpha, beta, bounds_)});
          int j = d - 1;
          while (j >= 0 && pick[j] + 1 == per_dim[j].size()) {
            pick[j] = 0;
            --j;
          }
          if (j < 0) break;
          ++pick[j];
        }
      });
    }
  }

  double evaluate(const Point& x) const {
    double sum = 0.0;
    for (const Entry& e : entries_)
      sum += e.coeff * hat(e.alpha, e.beta, x);
    return sum;
  }

  int level() const { return level_; }
  const BoundaryConfig& bounds() const { return bounds_; }
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  int level_;
  BoundaryConfig bounds_;
  std::vector<Entry> entries_;
};

inline double hierarchical_interp(const Evaluator& f, int k,
                                  const BoundaryConfig& bounds,
                                  const Point& x) {
  return SurplusSet(f, k, bounds).evaluate(x);
}

/// Alternating binomial weights of the sparse-grid combination
/// technique: weight (-1)^j C(d-1,j) on the shell |alpha| = k+d-1-j.
struct CombinationPlan {
  std::vector<std::pair<MultiIndex, long>> terms;
};

inline long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline CombinationPlan combination_plan(int k, int d) {
  if (k < 1) throw std::invalid_argument("combination_plan: k must be >= 1");
  CombinationPlan plan;
  for (int j = 0; j < d; ++j) {
    const long w = (j % 2 == 0 ? 1 : -1) * binomial(d - 1, j);
    for_each_composition(k + d - 1 - j, d, [&](const MultiIndex& alpha) {
      plan.terms.push_back({alpha, w});
    });
  }
  return plan;
}

inline double combination(const Evaluator& f, int k,
                          const BoundaryConfig& bounds, const Point& x) {
  const CombinationPlan plan = combination_plan(k, bounds.dim());
  double sum = 0.0;
  for (const auto& [alpha, w] : plan.terms)
    sum += static_cast<double>(w) * lagrange_full(f, alpha, bounds, x);
  return sum;
}

/// Combination-technique interpolant with a shared function cache for
/// repeated queries. Kept lazy per query so the sparse equivalence test
/// exercises a code path independent of SurplusSet.
class CombinationInterp {
 public:
  CombinationInterp(Evaluator f, int k, const BoundaryConfig& bounds)
      : f_(std::move(f)), plan_(combination_plan(k, bounds.dim())),
        bounds_(bounds) {}

  double evaluate(const Point& x) const {
    double sum = 0.0;
    const Evaluator cached = [this](const Point& p) { return f_(p); };
    for (const auto& [alpha, w] : plan_.terms)
      sum += static_cast<double>(w) * lagrange_full(cached, alpha, bounds_, x);
    return sum;
  }

 private:
  MemoizedFn f_;
  CombinationPlan plan_;
  BoundaryConfig bounds_;
};

}  // namespace bdrygp

#endif  // BDRYGP_FEM_HPP
