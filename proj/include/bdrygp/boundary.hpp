#ifndef BDRYGP_BOUNDARY_HPP
#define BDRYGP_BOUNDARY_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdrygp {

using Point = std::vector<double>;

/// Evaluates f at a point lying on a known boundary hyperplane.
using BoundaryOracle = std::function<double(const Point&)>;

/// Which input-domain faces carry known Dirichlet data. Dimensions are
/// 0-based; `left` marks x_j = 0 faces, `right` marks x_j = 1 faces.
class BoundaryConfig {
 public:
  BoundaryConfig() = default;
  explicit BoundaryConfig(int dim)
      : dim_(dim), left_(dim, 0), right_(dim, 0) {
    if (dim < 1) throw std::invalid_argument("BoundaryConfig: dim must be >= 1");
  }

  static BoundaryConfig none(int dim) { return BoundaryConfig(dim); }
  static BoundaryConfig full(int dim) {
    BoundaryConfig b(dim);
    std::fill(b.left_.begin(), b.left_.end(), 1);
    std::fill(b.right_.begin(), b.right_.end(), 1);
    return b;
  }
  static BoundaryConfig left_only(int dim) {
    BoundaryConfig b(dim);
    std::fill(b.left_.begin(), b.left_.end(), 1);
    return b;
  }
  static BoundaryConfig right_only(int dim) {
    BoundaryConfig b(dim);
    std::fill(b.right_.begin(), b.right_.end(), 1);
    return b;
  }

  int dim() const { return dim_; }
  bool left(int j) const { return left_.at(j) != 0; }
  bool right(int j) const { return right_.at(j) != 0; }

  BoundaryConfig& set_left(int j, bool v = true) {
    left_.at(j) = v ? 1 : 0;
    return *this;
  }
  BoundaryConfig& set_right(int j, bool v = true) {
    right_.at(j) = v ? 1 : 0;
    return *this;
  }

  /// True iff every dimension has at least one known boundary; hypothesis
  /// of the FEM equivalence results.
  bool covers_all() const {
    for (int j = 0; j < dim_; ++j)
      if (!left(j) && !right(j)) return false;
    return true;
  }

  /// True iff no dimension has any known boundary.
  bool empty() const {
    for (int j = 0; j < dim_; ++j)
      if (left(j) || right(j)) return false;
    return true;
  }

  bool operator==(const BoundaryConfig& o) const {
    return dim_ == o.dim_ && left_ == o.left_ && right_ == o.right_;
  }

 private:
  int dim_ = 0;
  std::vector<std::uint8_t> left_, right_;
};

inline void check_in_unit_cube(const Point& x, int dim, const char* where) {
  if (static_cast<int>(x.size()) != dim)
    throw std::domain_error(std::string(where) + ": dimension mismatch");
  for (double v : x)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::domain_error(std::string(where) + ": point outside [0,1]^d");
}

/// Projections of a base point onto the known boundary hyperplanes,
/// deduplicated; `values` is filled by the mean-function solve.
struct ProjectionSet {
  Point base;
  std::vector<Point> points;
  std::vector<double> values;
};

/// Projects x onto each known boundary hyperplane (x_j -> 0 for left,
/// x_j -> 1 for right) and drops exact duplicates.
inline ProjectionSet project(const Point& x, const BoundaryConfig& bounds) {
  check_in_unit_cube(x, bounds.dim(), "project");
  ProjectionSet ps;
  ps.base = x;
  auto push_unique = [&ps](Point p) {
    for (const Point& q : ps.points)
      if (q == p) return;
    ps.points.push_back(std::move(p));
  };
  for (int j = 0; j < bounds.dim(); ++j) {
    if (bounds.left(j)) {
      Point p = x;
      p[j] = 0.0;
      push_unique(std::move(p));
    }
  }
  for (int j = 0; j < bounds.dim(); ++j) {
    if (bounds.right(j)) {
      Point p = x;
      p[j] = 1.0;
      push_unique(std::move(p));
    }
  }
  return ps;
}

inline bool is_on_known_boundary(const Point& x, const BoundaryConfig& bounds) {
  check_in_unit_cube(x, bounds.dim(), "is_on_known_boundary");
  for (int j = 0; j < bounds.dim(); ++j) {
    if (bounds.left(j) && x[j] == 0.0) return true;
    if (bounds.right(j) && x[j] == 1.0) return true;
  }
  return false;
}

/// Truncated-power radial kernel phi(x,y) = max{(1 - ||x-y||)^nu, 0}.
inline double wendland(const Point& a, const Point& b, int nu) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  const double t = 1.0 - std::sqrt(s);
  if (t <= 0.0) return 0.0;
  double r = 1.0;
  for (int i = 0; i < nu; ++i) r *= t;
  return r;
}

/// Positive-definiteness of the truncated power kernel in R^d needs
/// nu >= floor(d/2) + 1; this is the smallest admissible exponent.
inline int default_wendland_exponent(int dim) { return dim / 2 + 1; }

struct MeanSpec {
  BoundaryOracle oracle;
  BoundaryConfig bounds;
  int wendland_exponent = 0;  // 0 means: use default for bounds.dim()
  double jitter_scale = 1e-10;

  MeanSpec() = default;
  MeanSpec(BoundaryOracle f, BoundaryConfig b, int nu = 0,
           double jitter = 1e-10)
      : oracle(std::move(f)), bounds(std::move(b)), wendland_exponent(nu),
        jitter_scale(jitter) {
    if (wendland_exponent == 0)
      wendland_exponent = default_wendland_exponent(bounds.dim());
    if (wendland_exponent < default_wendland_exponent(bounds.dim()))
      throw std::invalid_argument(
          "MeanSpec: wendland exponent too small for positive definiteness");
  }
};

struct MeanResult {
  double value = 0.0;
  bool no_boundary = false;
};

/// RBF interpolant of the boundary values at the projections of x.
/// Returns 0 with the no-boundary flag when no boundaries are known.
inline MeanResult mean_function_full(const Point& x, const MeanSpec& spec) {
  check_in_unit_cube(x, spec.bounds.dim(), "mean_function");
  if (spec.bounds.empty()) return {0.0, true};

  ProjectionSet ps = project(x, spec.bounds);
  const int m = static_cast<int>(ps.points.size());
  const int nu = spec.wendland_exponent;

  Eigen::MatrixXd G(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j)
      G(i, j) = G(j, i) = wendland(ps.points[i], ps.points[j], nu);
  Eigen::VectorXd v(m);
  for (int i = 0; i < m; ++i) v[i] = spec.oracle(ps.points[i]);

  double jitter = spec.jitter_scale * (G.trace() / m);
  for (int attempt = 0; attempt < 4; ++attempt) {
    Eigen::MatrixXd Gj = G + jitter * Eigen::MatrixXd::Identity(m, m);
    Eigen::LLT<Eigen::MatrixXd> llt(Gj);
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd c = llt.solve(v);
      double mu = 0.0;
      for (int i = 0; i < m; ++i) mu += wendland(x, ps.points[i], nu) * c[i];
      return {mu, false};
    }
    jitter = (jitter == 0.0) ? 1e-12 : jitter * 100.0;
  }
  throw std::runtime_error(
      "mean_function: projected gram singular despite dedup and jitter "
      "(size " + std::to_string(m) + ")");
}

inline double mean_function(const Point& x, const MeanSpec& spec) {
  return mean_function_full(x, spec).value;
}

}  // namespace bdrygp

#endif  // BDRYGP_BOUNDARY_HPP
