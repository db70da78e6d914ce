#ifndef BDRYGP_GP_HPP
#define BDRYGP_GP_HPP

#include "bdrygp/boundary.hpp"
#include "bdrygp/kernels.hpp"

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace bdrygp {

using Evaluator = std::function<double(const Point&)>;

class SingularModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PosteriorSummary {
  double mean = 0.0;
  double variance = 0.0;
};

/// Fitted GP: design, kernel, boundary mean, residuals, and the Cholesky
/// factor of (gram + jitter I). Immutable after fit(); predictions are
/// pure and safe to call concurrently.
class GPModel {
 public:
  /// Prior model with an empty design (n = 0 guard path): predictions
  /// return the prior mean / covariance unchanged.
  static GPModel prior(KernelParams params, BoundaryConfig bounds,
                       KernelFamily family, MeanSpec mean = {}) {
    GPModel m;
    m.params_ = std::move(params);
    m.bounds_ = std::move(bounds);
    m.family_ = family;
    m.mean_ = std::move(mean);
    m.has_mean_ = static_cast<bool>(m.mean_.oracle);
    return m;
  }

  static GPModel fit(const std::vector<Point>& design, KernelParams params,
                     BoundaryConfig bounds, KernelFamily family,
                     MeanSpec mean_spec, const Evaluator& f) {
    const int n = static_cast<int>(design.size());
    if (n == 0) throw std::invalid_argument("GPModel::fit: empty design");
    check_no_duplicates(design);

    GPModel m;
    m.X_ = design;
    m.params_ = std::move(params);
    m.bounds_ = std::move(bounds);
    m.family_ = family;
    m.mean_ = std::move(mean_spec);
    m.has_mean_ = static_cast<bool>(m.mean_.oracle) && !m.bounds_.empty();

    m.residuals_.resize(n);
    for (int i = 0; i < n; ++i)
      m.residuals_[i] = f(design[i]) - m.prior_mean(design[i]);

    // escalating jitter ladder, relative to the mean diagonal
    static constexpr double kLadder[] = {0.0, 1e-12, 1e-10, 1e-8};
    double mean_diag = 0.0;
    for (int i = 0; i < n; ++i)
      mean_diag +=
          kernel_product(design[i], design[i], m.params_, m.bounds_, family);
    mean_diag /= n;

    for (double rel : kLadder) {
      m.factor_.resize(0, 0);  // keep one n x n allocation live at a time
      m.factor_ = gram(design, m.params_, m.bounds_, family);
      m.jitter_used_ = rel * mean_diag;
      if (m.jitter_used_ > 0.0)
        m.factor_.diagonal().array() += m.jitter_used_;
      const int info = LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n,
                                      m.factor_.data(), n);
      if (info == 0) {
        m.weights_ = m.solve(m.residuals_);
        return m;
      }
    }
    std::ostringstream msg;
    msg << "GPModel::fit: gram factorization failed at max jitter (n=" << n
        << ")";
    throw SingularModelError(msg.str());
  }

  int size() const { return static_cast<int>(X_.size()); }
  const std::vector<Point>& design() const { return X_; }
  const KernelParams& params() const { return params_; }
  const BoundaryConfig& bounds() const { return bounds_; }
  KernelFamily family() const { return family_; }
  double jitter_used() const { return jitter_used_; }
  const Eigen::VectorXd& residuals() const { return residuals_; }
  const Eigen::MatrixXd& factor() const { return factor_; }
  long clamped_variances() const { return clamp_count_->load(); }

  double prior_mean(const Point& x) const {
    return has_mean_ ? mean_function(x, mean_) : 0.0;
  }

  double predict_mean(const Point& x) const {
    check_in_unit_cube(x, bounds_.dim(), "predict_mean");
    double mu = prior_mean(x);
    if (size() == 0) return mu;
    const Eigen::VectorXd kx = cov_vector(x);
    return mu + kx.dot(weights_);
  }

  double posterior_cov(const Point& x, const Point& y) const {
    check_in_unit_cube(x, bounds_.dim(), "posterior_cov");
    check_in_unit_cube(y, bounds_.dim(), "posterior_cov");
    const double kxy = kernel_product(x, y, params_, bounds_, family_);
    if (size() == 0) return kxy;
    const Eigen::VectorXd kx = cov_vector(x);
    const Eigen::VectorXd ky = cov_vector(y);
    return kxy - kx.dot(solve(ky));
  }

  std::vector<PosteriorSummary> predict_batch(
      const std::vector<Point>& points) const {
    std::vector<PosteriorSummary> out;
    out.reserve(points.size());
    const double sigma2 =
        family_ == KernelFamily::Brownian ? 1.0 : params_.variance;
    for (std::size_t i = 0; i < points.size(); ++i) {
      try {
        PosteriorSummary s;
        s.mean = predict_mean(points[i]);
        double v = posterior_cov(points[i], points[i]);
        if (v < 0.0) {
          if (v >= -1e-10 * sigma2) {
            v = 0.0;
            ++*clamp_count_;
          } else {
            throw std::runtime_error("posterior variance below clamp window");
          }
        }
        s.variance = v;
        out.push_back(s);
      } catch (const std::exception& e) {
        throw std::runtime_error("predict_batch: element " +
                                 std::to_string(i) + ": " + e.what());
      }
    }
    return out;
  }

  /// Solve (gram + jitter I) z = b with the cached factor.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd z = factor_.triangularView<Eigen::Lower>().solve(b);
    return factor_.triangularView<Eigen::Lower>().transpose().solve(z);
  }

 private:
  Eigen::VectorXd cov_vector(const Point& x) const {
    Eigen::VectorXd kx(size());
    for (int i = 0; i < size(); ++i)
      kx[i] = kernel_product(x, X_[i], params_, bounds_, family_);
    return kx;
  }

  static void check_no_duplicates(const std::vector<Point>& design) {
    std::vector<int> idx(design.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return design[a] < design[b]; });
    for (std::size_t i = 1; i < idx.size(); ++i) {
      if (design[idx[i - 1]] == design[idx[i]]) {
        std::ostringstream msg;
        msg << "GPModel::fit: duplicate design points at indices "
            << idx[i - 1] << " and " << idx[i] << " (";
        for (double v : design[idx[i]]) msg << v << " ";
        msg << ")";
        throw SingularModelError(msg.str());
      }
    }
  }

  std::vector<Point> X_;
  KernelParams params_;
  BoundaryConfig bounds_;
  KernelFamily family_ = KernelFamily::BdryMatern;
  MeanSpec mean_;
  bool has_mean_ = false;
  Eigen::VectorXd residuals_;
  Eigen::VectorXd weights_;  // gram^{-1} residuals, cached at fit
  Eigen::MatrixXd factor_;   // lower-triangular Cholesky factor
  double jitter_used_ = 0.0;
  // shared so the model stays movable; counts round-off variance clamps
  std::shared_ptr<std::atomic<long>> clamp_count_ =
      std::make_shared<std::atomic<long>>(0);
};

/// Closed-form inverse of the left-boundary Brownian gram on a sorted
/// 1-d design: symmetric tridiagonal with x_0 = 0 prepended.
inline Eigen::MatrixXd tridiag_inverse_1d(const std::vector<double>& points) {
  const int n = static_cast<int>(points.size());
  if (n == 0) throw std::domain_error("tridiag_inverse_1d: empty design");
  double prev = 0.0;
  for (double x : points) {
    if (!(x > prev && x <= 1.0))
      throw std::domain_error(
          "tridiag_inverse_1d: points must be strictly increasing in (0,1]");
    prev = x;
  }
  auto x = [&](int i) { return i == 0 ? 0.0 : points[i - 1]; };
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i <= n; ++i) {
    if (i < n)
      T(i - 1, i - 1) =
          (x(i + 1) - x(i - 1)) / ((x(i) - x(i - 1)) * (x(i + 1) - x(i)));
    else
      T(n - 1, n - 1) = 1.0 / (x(n) - x(n - 1));
    if (i >= 2) {
      const double off = -1.0 / (x(i) - x(i - 1));
      T(i - 1, i - 2) = off;
      T(i - 2, i - 1) = off;
    }
  }
  return T;
}

}  // namespace bdrygp

#endif  // BDRYGP_GP_HPP
