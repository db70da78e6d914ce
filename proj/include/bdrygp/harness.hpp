#ifndef BDRYGP_HARNESS_HPP
#define BDRYGP_HARNESS_HPP

#include "bdrygp/boundary.hpp"
#include "bdrygp/designs.hpp"
#include "bdrygp/fem.hpp"
#include "bdrygp/gp.hpp"
#include "bdrygp/kernels.hpp"
#include "bdrygp/test_functions.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdrygp {

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StudyConfig {
  std::string function = "corner_peak";
  int d = 3;
  int k_min = 2;
  int k_max = 5;
  std::string boundary_mode = "full";  // full | left | none
  std::string family = "bdrymatern";   // bdrymatern | brownian
  double omega = 1.0;
  double sigma2 = 1.0;
  int mc_points = 1000;
  std::uint64_t rng_seed = 0;
  std::string error_norm = "L1";  // L1 | Linf
  long long budget = 200000;
};

struct ErrorRow {
  std::string method;
  std::string function;
  int d = 0;
  std::string boundary_mode;
  int level = 0;
  long long n = 0;
  std::string error_norm;
  double error = 0.0;
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
};

struct SlopeSummary {
  std::string method;
  double slope_vs_level = 0.0;   // least squares of log2(error) vs k
  double slope_vs_log2n = 0.0;   // least squares of log2(error) vs log2(n)
};

struct ErrorReport {
  std::vector<ErrorRow> rows;
  std::vector<SlopeSummary> slopes;

  void merge(const ErrorReport& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    slopes.insert(slopes.end(), other.slopes.begin(), other.slopes.end());
  }
};

inline BoundaryConfig bounds_for_mode(const std::string& mode, int d) {
  if (mode == "full") return BoundaryConfig::full(d);
  if (mode == "left") return BoundaryConfig::left_only(d);
  if (mode == "none") return BoundaryConfig::none(d);
  throw ConfigError("unknown boundary mode: " + mode);
}

inline KernelFamily family_of(const std::string& name) {
  if (name == "bdrymatern") return KernelFamily::BdryMatern;
  if (name == "brownian") return KernelFamily::Brownian;
  throw ConfigError("unknown kernel family: " + name);
}

inline std::vector<Point> mc_sample(int d, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts(count, Point(d));
  for (auto& p : pts)
    for (double& v : p) v = u(rng);
  return pts;
}

inline double estimate_error(const Evaluator& predictor,
                             const Evaluator& truth,
                             const std::vector<Point>& points,
                             const std::string& norm) {
  if (norm != "L1" && norm != "Linf")
    throw ConfigError("unknown error norm: " + norm);
  double acc = 0.0;
  for (const Point& p : points) {
    const double e = std::abs(truth(p) - predictor(p));
    if (norm == "L1")
      acc += e;
    else
      acc = std::max(acc, e);
  }
  return norm == "L1" ? acc / static_cast<double>(points.size()) : acc;
}

inline double estimate_error(const Evaluator& predictor,
                             const Evaluator& truth, int d,
                             const std::string& norm, int mc_points,
                             std::uint64_t seed) {
  return estimate_error(predictor, truth, mc_sample(d, mc_points, seed), norm);
}

inline double fit_slope(const std::vector<double>& xs,
                        const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

inline void validate(const StudyConfig& c) {
  if (c.d < 1) throw ConfigError("d must be >= 1");
  if (c.k_min < 1) throw ConfigError("k_min must be >= 1");
  if (c.k_max < c.k_min) throw ConfigError("k_max must be >= k_min");
  if (c.mc_points < 1) throw ConfigError("mc_points must be >= 1");
  if (!(c.omega > 0.0)) throw ConfigError("omega must be > 0");
  if (!(c.sigma2 > 0.0)) throw ConfigError("sigma2 must be > 0");
  if (c.budget < 1) throw ConfigError("budget must be >= 1");
  if (c.error_norm != "L1" && c.error_norm != "Linf")
    throw ConfigError("error_norm must be L1 or Linf");
  bounds_for_mode(c.boundary_mode, c.d);
  const KernelFamily fam = family_of(c.family);
  if (c.boundary_mode == "none" && fam == KernelFamily::Brownian)
    throw ConfigError("boundary mode none requires the bdrymatern family");
  if (fam == KernelFamily::Brownian && c.sigma2 != 1.0)
    throw ConfigError("the Brownian family carries no variance parameter");
  test_function(c.function);
}

inline std::string method_name(const StudyConfig& c) {
  return c.family + "-" + c.boundary_mode;
}

/// Runs one method (family + boundary mode) over the configured levels:
/// sparse-grid design, GP fit with the boundary oracle as mean data,
/// Monte-Carlo error over a shared seeded point set, slope fit.
inline ErrorReport run_convergence_study(const StudyConfig& config) {
  validate(config);
  const int d = config.d;
  const BoundaryConfig bounds = bounds_for_mode(config.boundary_mode, d);
  const KernelFamily family = family_of(config.family);
  const Evaluator truth = test_function(config.function);
  const KernelParams params =
      KernelParams::isotropic(d, config.omega, config.sigma2);
  const std::vector<Point> probe =
      mc_sample(d, config.mc_points, config.rng_seed);

  // budget safety: design sizes are checked before any gram is assembled
  for (int k = config.k_min; k <= config.k_max; ++k) {
    long long n = 0;
    for (int s = k; s <= k + d - 1; ++s)
      for_each_composition(s, d, [&](const MultiIndex& alpha) {
        n += static_cast<long long>(full_grid_size(alpha, bounds));
      });
    if (n > config.budget)
      throw BudgetError("design at level " + std::to_string(k) +
                        " exceeds point budget (upper bound " +
                        std::to_string(n) + " > " +
                        std::to_string(config.budget) + ")");
  }

  ErrorReport report;
  const std::string method = method_name(config);
  for (int k = config.k_min; k <= config.k_max; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const SparseGrid sg = sparse_grid(k, d, bounds);
    const long long n = static_cast<long long>(sg.points.size());
    if (n > config.budget)
      throw BudgetError("design at level " + std::to_string(k) +
                        " exceeds point budget");
    std::vector<Point> design;
    design.reserve(sg.points.size());
    for (const auto& p : sg.points) design.push_back(p.values());

    MeanSpec mean;
    if (!bounds.empty()) mean = MeanSpec(truth, bounds);
    const GPModel model =
        GPModel::fit(design, params, bounds, family, mean, truth);
    const double err = estimate_error(
        [&model](const Point& p) { return model.predict_mean(p); }, truth,
        probe, config.error_norm);
    const auto t1 = std::chrono::steady_clock::now();
    const double wall_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    report.rows.push_back({method, config.function, d, config.boundary_mode,
                           k, n, config.error_norm, err, wall_ms,
                           config.rng_seed});
  }

  std::vector<double> ks, log2n, log2err;
  for (const ErrorRow& r : report.rows) {
    ks.push_back(r.level);
    log2n.push_back(std::log2(static_cast<double>(r.n)));
    log2err.push_back(std::log2(std::max(r.error, 1e-300)));
  }
  report.slopes.push_back(
      {method, fit_slope(ks, log2err), fit_slope(log2n, log2err)});
  return report;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// CSV writer. Timing is volatile, so wall_ms is serialized as 0 unless
/// explicitly requested; reruns with the same config and seed are then
/// byte-identical.
inline void emit_report(const ErrorReport& report, std::ostream& out,
                        bool include_timing = false) {
  out << "method,function,d,boundary_mode,level,n,error_norm,error,wall_ms,"
         "seed\n";
  std::vector<std::string> methods;
  for (const ErrorRow& r : report.rows) {
    bool seen = false;
    for (const auto& m : methods) seen = seen || m == r.method;
    if (!seen) methods.push_back(r.method);
  }
  for (const std::string& m : methods) {
    std::vector<const ErrorRow*> rows;
    for (const ErrorRow& r : report.rows)
      if (r.method == m) rows.push_back(&r);
    std::sort(rows.begin(), rows.end(),
              [](const ErrorRow* a, const ErrorRow* b) {
                return a->level < b->level;
              });
    for (const ErrorRow* r : rows) {
      out << r->method << ',' << r->function << ',' << r->d << ','
          << r->boundary_mode << ',' << r->level << ',' << r->n << ','
          << r->error_norm << ',' << format_double(r->error) << ','
          << format_double(include_timing ? r->wall_ms : 0.0) << ','
          << r->seed << '\n';
    }
  }
  for (const SlopeSummary& s : report.slopes)
    out << "# slope method=" << s.method
        << " log2err_vs_k=" << format_double(s.slope_vs_level)
        << " log2err_vs_log2n=" << format_double(s.slope_vs_log2n) << '\n';
}

inline void emit_report(const ErrorReport& report, const std::string& path,
                        bool include_timing = false) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit_report: cannot open " + path);
  emit_report(report, out, include_timing);
  if (!out) throw std::runtime_error("emit_report: write failed for " + path);
}

// ---------------------------------------------------------------------------
// Equivalence checks: Brownian-kernel GP vs the two FEM interpolants.

struct EquivReport {
  bool pass = false;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  long long n_design = 0;
  int n_queries = 0;
  std::string what;
};

/// Default test function for the equivalence checks: per-dimension
/// factors vanishing on the known boundaries of that dimension (and
/// deliberately nonzero on unknown faces).
inline Evaluator equivalence_function(const BoundaryConfig& bounds) {
  return [bounds](const Point& x) {
    double v = 1.0;
    for (int j = 0; j < bounds.dim(); ++j) {
      switch (kind_of(bounds, j)) {
        case BoundaryKind::Full:
          v *= x[j] * (1.0 - x[j]);
          break;
        case BoundaryKind::Left:
          v *= x[j] * (2.0 - x[j]);
          break;
        case BoundaryKind::Right:
          v *= (1.0 - x[j]) * (1.0 + x[j]);
          break;
        case BoundaryKind::None:
          break;
      }
    }
    return v;
  };
}

namespace detail {

inline EquivReport equivalence_against(
    const std::vector<Point>& design, const BoundaryConfig& bounds,
    const Evaluator& f, const Evaluator& fem, std::uint64_t seed,
    double perturb, const std::string& what) {
  if (!bounds.covers_all())
    throw std::invalid_argument(
        "equivalence check requires a known boundary in every dimension");
  const int d = bounds.dim();
  const KernelParams params = KernelParams::isotropic(d, 1.0, 1.0);
  const GPModel model = GPModel::fit(design, params, bounds,
                                     KernelFamily::Brownian,
                                     MeanSpec(f, bounds), f);
  // test hook: perturbing one cross-covariance entry must break the match
  Eigen::VectorXd weights;
  if (perturb != 0.0) weights = model.solve(model.residuals());

  const std::vector<Point> queries = mc_sample(d, 200, seed);
  double max_f = 0.0, max_dev = 0.0;
  for (const Point& q : queries) {
    double gp = model.predict_mean(q);
    if (perturb != 0.0 && model.size() > 0) gp += perturb * weights[0];
    max_dev = std::max(max_dev, std::abs(gp - fem(q)));
    max_f = std::max(max_f, std::abs(f(q)));
  }
  EquivReport rep;
  rep.max_deviation = max_dev;
  rep.tolerance = 1e-8 * (1.0 + max_f);
  rep.pass = max_dev <= rep.tolerance;
  rep.n_design = static_cast<long long>(design.size());
  rep.n_queries = static_cast<int>(queries.size());
  rep.what = what;
  return rep;
}

}  // namespace detail

inline EquivReport run_equivalence_check_full(const MultiIndex& alpha,
                                              const BoundaryConfig& bounds,
                                              std::uint64_t seed,
                                              double perturb = 0.0) {
  const Evaluator f = equivalence_function(bounds);
  const FullGrid grid = full_grid(alpha, bounds);
  std::vector<Point> design;
  for (const auto& p : grid.points) design.push_back(p.values());
  const Evaluator fem = [&f, &alpha, &bounds](const Point& x) {
    return lagrange_full(f, alpha, bounds, x);
  };
  std::ostringstream what;
  what << "full grid alpha=(";
  for (std::size_t j = 0; j < alpha.size(); ++j)
    what << (j ? "," : "") << alpha[j];
  what << ")";
  return detail::equivalence_against(design, bounds, f, fem, seed, perturb,
                                     what.str());
}

inline EquivReport run_equivalence_check_sparse(int k,
                                                const BoundaryConfig& bounds,
                                                std::uint64_t seed,
                                                double perturb = 0.0) {
  const Evaluator f = equivalence_function(bounds);
  const SparseGrid sg = sparse_grid(k, bounds.dim(), bounds);
  std::vector<Point> design;
  for (const auto& p : sg.points) design.push_back(p.values());
  CombinationInterp fem(f, k, bounds);
  return detail::equivalence_against(
      design, bounds, f, [&fem](const Point& x) { return fem.evaluate(x); },
      seed, perturb, "sparse grid k=" + std::to_string(k));
}

}  // namespace bdrygp

#endif  // BDRYGP_HARNESS_HPP
