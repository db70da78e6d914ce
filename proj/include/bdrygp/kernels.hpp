#ifndef BDRYGP_KERNELS_HPP
#define BDRYGP_KERNELS_HPP

#include "bdrygp/boundary.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace bdrygp {

/// Per-dimension boundary case of the 1-d kernel.
enum class BoundaryKind { Full, Left, Right, None };

inline BoundaryKind kind_of(const BoundaryConfig& bounds, int j) {
  const bool l = bounds.left(j), r = bounds.right(j);
  if (l && r) return BoundaryKind::Full;
  if (l) return BoundaryKind::Left;
  if (r) return BoundaryKind::Right;
  return BoundaryKind::None;
}

enum class KernelFamily { BdryMatern, Brownian };

struct KernelParams {
  std::vector<double> omegas;  // wavelength per dimension
  double variance = 1.0;

  KernelParams() = default;
  KernelParams(std::vector<double> w, double sigma2 = 1.0)
      : omegas(std::move(w)), variance(sigma2) {
    for (double om : omegas)
      if (!(om > 0.0))
        throw std::invalid_argument("KernelParams: wavelengths must be > 0");
    if (!(variance > 0.0))
      throw std::invalid_argument("KernelParams: variance must be > 0");
  }
  static KernelParams isotropic(int d, double omega, double sigma2 = 1.0) {
    return KernelParams(std::vector<double>(d, omega), sigma2);
  }
  int dim() const { return static_cast<int>(omegas.size()); }
};

namespace detail {
// sinh args beyond ~350 switch to exp-shifted forms; the closed forms
// otherwise overflow near omega ~ 700 even though the value is bounded.
constexpr double kSinhSwitch = 350.0;
}  // namespace detail

/// 1-d BdryMatern kernel: four closed forms keyed on which endpoints of
/// [0,1] carry known boundary values. Vanishes at known endpoints and
/// reduces to Matern-1/2 with no boundary.
inline double k1d_bdrymatern(double x, double y, double omega,
                             BoundaryKind kind) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
    throw std::domain_error("k1d_bdrymatern: arguments outside [0,1]");
  if (!(omega > 0.0))
    throw std::domain_error("k1d_bdrymatern: omega must be > 0");
  const double a = std::min(x, y), b = std::max(x, y);
  switch (kind) {
    case BoundaryKind::Full: {
      const double p = omega * a, q = omega * (1.0 - b), r = omega;
      if (r < detail::kSinhSwitch)
        return std::sinh(p) * std::sinh(q) / std::sinh(r);
      // sinh(p)sinh(q)/sinh(r) with all exponents shifted below zero
      const double s = std::abs(p - q);
      return (std::exp(p + q - r) + std::exp(-p - q - r) - std::exp(s - r) -
              std::exp(-s - r)) /
             (2.0 * (1.0 - std::exp(-2.0 * r)));
    }
    case BoundaryKind::Left: {
      const double p = omega * a, m = omega * b;
      if (p < detail::kSinhSwitch) return std::sinh(p) * std::exp(-m);
      return 0.5 * (std::exp(p - m) - std::exp(-p - m));
    }
    case BoundaryKind::Right: {
      const double p = omega * (1.0 - b), m = omega * a;
      if (p < detail::kSinhSwitch && m < detail::kSinhSwitch)
        return std::exp(m) * std::sinh(p);
      return 0.5 * (std::exp(m + p) - std::exp(m - p));
    }
    case BoundaryKind::None:
      return std::exp(-omega * (b - a));
  }
  throw std::logic_error("k1d_bdrymatern: unreachable");
}

/// Normalized omega -> 0+ limit of the BdryMatern kernel: Brownian
/// bridge (full) and Brownian motion (left/right) covariances. Not
/// defined for the no-boundary case.
inline double k1d_brownian(double x, double y, BoundaryKind kind) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
    throw std::domain_error("k1d_brownian: arguments outside [0,1]");
  const double a = std::min(x, y), b = std::max(x, y);
  switch (kind) {
    case BoundaryKind::Full:
      return a * (1.0 - b);
    case BoundaryKind::Left:
      return a;
    case BoundaryKind::Right:
      return 1.0 - b;
    case BoundaryKind::None:
      throw std::invalid_argument(
          "k1d_brownian: no Brownian limit without a boundary");
  }
  throw std::logic_error("k1d_brownian: unreachable");
}

inline double kernel_product(const Point& x, const Point& y,
                             const KernelParams& params,
                             const BoundaryConfig& bounds,
                             KernelFamily family) {
  const int d = bounds.dim();
  if (static_cast<int>(x.size()) != d || static_cast<int>(y.size()) != d ||
      params.dim() != d)
    throw std::domain_error("kernel_product: dimension mismatch");
  if (family == KernelFamily::Brownian) {
    if (!bounds.covers_all())
      throw std::invalid_argument(
          "kernel_product: Brownian family requires a known boundary in "
          "every dimension");
    if (params.variance != 1.0)
      throw std::invalid_argument(
          "kernel_product: Brownian family carries no variance parameter");
    double k = 1.0;
    for (int j = 0; j < d; ++j)
      k *= k1d_brownian(x[j], y[j], kind_of(bounds, j));
    return k;
  }
  double k = params.variance;
  for (int j = 0; j < d; ++j)
    k *= k1d_bdrymatern(x[j], y[j], params.omegas[j], kind_of(bounds, j));
  return k;
}

/// Covariance matrix over a point set; upper triangle computed, then
/// mirrored, so the result is exactly symmetric.
inline Eigen::MatrixXd gram(const std::vector<Point>& points,
                            const KernelParams& params,
                            const BoundaryConfig& bounds,
                            KernelFamily family) {
  const int n = static_cast<int>(points.size());
  if (n == 0) throw std::invalid_argument("gram: empty point list");
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = kernel_product(points[i], points[j], params, bounds, family);
      K(i, j) = v;
      K(j, i) = v;
    }
  return K;
}

}  // namespace bdrygp

#endif  // BDRYGP_KERNELS_HPP
