// bdrygp command line: convergence benchmarks, GP-vs-FEM equivalence
// checks, and one-off predictions. See README for usage.

#include "bdrygp/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;
constexpr int kExitCheckFailed = 4;

void add_model_options(CLI::App* app, bdrygp::StudyConfig& cfg) {
  app->add_option("--function", cfg.function,
                  "Test function: corner_peak, product_peak, rosenbrock");
  app->add_option("--d", cfg.d, "Input dimension");
  app->add_option("--boundary_mode", cfg.boundary_mode,
                  "Boundary mode: full, left, none");
  app->add_option("--family", cfg.family,
                  "Kernel family: bdrymatern, brownian");
  app->add_option("--omega", cfg.omega, "Kernel wavelength (all dimensions)");
  app->add_option("--sigma2", cfg.sigma2, "Kernel variance");
  app->add_option("--seed,--rng_seed", cfg.rng_seed, "RNG seed");
  app->add_option("--budget", cfg.budget, "Design point budget");
}

std::vector<bdrygp::Point> read_points_file(const std::string& path, int d) {
  std::ifstream in(path);
  if (!in) throw bdrygp::ConfigError("cannot open points file: " + path);
  std::vector<bdrygp::Point> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    bdrygp::Point p;
    double v;
    while (row >> v) p.push_back(v);
    if (p.empty()) continue;
    if (static_cast<int>(p.size()) != d)
      throw bdrygp::ConfigError("points file row has " +
                                std::to_string(p.size()) +
                                " coordinates, expected " + std::to_string(d));
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-constrained Gaussian process benchmarks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file (TOML-style key=value)");
  app.allow_config_extras(CLI::config_extras_mode::error);

  bdrygp::StudyConfig cfg;
  std::string out_path;
  bool timing = false;

  CLI::App* bench = app.add_subcommand("bench", "Run a convergence study");
  add_model_options(bench, cfg);
  bench->add_option("--k_min", cfg.k_min, "Smallest sparse-grid level");
  bench->add_option("--k_max", cfg.k_max, "Largest sparse-grid level");
  bench->add_option("--mc_points", cfg.mc_points,
                    "Monte-Carlo evaluation points");
  bench->add_option("--error_norm", cfg.error_norm, "Error norm: L1 or Linf");
  bench->add_option("--out", out_path, "CSV output path (default stdout)");
  bench->add_flag("--timing", timing,
                  "Write measured wall times into the CSV (breaks "
                  "byte-for-byte reproducibility)");

  int equiv_d = 2;
  int equiv_k = 3;
  std::vector<int> equiv_alpha;
  std::string equiv_mode = "full";
  std::uint64_t equiv_seed = 0;
  double equiv_perturb = 0.0;
  CLI::App* equiv =
      app.add_subcommand("equiv", "Check GP and FEM interpolants agree");
  equiv->add_option("--d", equiv_d, "Input dimension");
  equiv->add_option("--k", equiv_k, "Sparse-grid level");
  equiv->add_option("--alpha", equiv_alpha,
                    "Full-grid levels per dimension (overrides --k)");
  equiv->add_option("--boundary_mode", equiv_mode,
                    "Boundary mode: full or left");
  equiv->add_option("--seed", equiv_seed, "RNG seed for query points");
  equiv->add_option("--perturb", equiv_perturb,
                    "Test hook: perturb one cross-covariance entry")
      ->group("");  // hidden

  int predict_k = 3;
  std::string points_path;
  CLI::App* predict = app.add_subcommand(
      "predict", "Fit one model and predict at points from a file");
  add_model_options(predict, cfg);
  predict->add_option("--k", predict_k, "Sparse-grid design level");
  predict->add_option("--points", points_path,
                      "File of query points, one per line")
      ->required();
  predict->add_option("--out", out_path, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (bench->parsed()) {
      const bdrygp::ErrorReport report = bdrygp::run_convergence_study(cfg);
      if (out_path.empty())
        bdrygp::emit_report(report, std::cout, timing);
      else
        bdrygp::emit_report(report, out_path, timing);
      for (const bdrygp::ErrorRow& r : report.rows)
        std::cerr << r.method << " k=" << r.level << " n=" << r.n
                  << " error=" << r.error << " wall_ms=" << r.wall_ms << "\n";
      return kExitOk;
    }

    if (equiv->parsed()) {
      if (equiv_mode != "full" && equiv_mode != "left")
        throw bdrygp::ConfigError(
            "equiv needs a known boundary in every dimension (full or left)");
      const bdrygp::BoundaryConfig bounds =
          bdrygp::bounds_for_mode(equiv_mode, equiv_d);
      bdrygp::EquivReport rep;
      if (!equiv_alpha.empty()) {
        if (static_cast<int>(equiv_alpha.size()) != equiv_d)
          throw bdrygp::ConfigError("--alpha must have d entries");
        rep = bdrygp::run_equivalence_check_full(equiv_alpha, bounds,
                                                 equiv_seed, equiv_perturb);
      } else {
        rep = bdrygp::run_equivalence_check_sparse(equiv_k, bounds, equiv_seed,
                                                   equiv_perturb);
      }
      std::cout << (rep.pass ? "PASS" : "FAIL") << " " << rep.what
                << " n_design=" << rep.n_design
                << " max_deviation=" << bdrygp::format_double(rep.max_deviation)
                << " tolerance=" << bdrygp::format_double(rep.tolerance)
                << "\n";
      return rep.pass ? kExitOk : kExitCheckFailed;
    }

    // predict
    bdrygp::validate(cfg);
    if (predict_k < 1) throw bdrygp::ConfigError("--k must be >= 1");
    const bdrygp::BoundaryConfig bounds =
        bdrygp::bounds_for_mode(cfg.boundary_mode, cfg.d);
    const bdrygp::Evaluator truth = bdrygp::test_function(cfg.function);
    const bdrygp::SparseGrid sg =
        bdrygp::sparse_grid(predict_k, cfg.d, bounds);
    if (static_cast<long long>(sg.points.size()) > cfg.budget)
      throw bdrygp::BudgetError("design at level " +
                                std::to_string(predict_k) +
                                " exceeds point budget");
    std::vector<bdrygp::Point> design;
    for (const auto& p : sg.points) design.push_back(p.values());
    bdrygp::MeanSpec mean;
    if (!bounds.empty()) mean = bdrygp::MeanSpec(truth, bounds);
    const bdrygp::GPModel model = bdrygp::GPModel::fit(
        design, bdrygp::KernelParams::isotropic(cfg.d, cfg.omega, cfg.sigma2),
        bounds, bdrygp::family_of(cfg.family), mean, truth);

    const std::vector<bdrygp::Point> queries =
        read_points_file(points_path, cfg.d);
    const std::vector<bdrygp::PosteriorSummary> post =
        model.predict_batch(queries);
    std::ostringstream csv;
    csv << "mean,variance\n";
    for (const auto& s : post)
      csv << bdrygp::format_double(s.mean) << ','
          << bdrygp::format_double(s.variance) << '\n';
    if (out_path.empty()) {
      std::cout << csv.str();
    } else {
      std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot open " + out_path);
      out << csv.str();
    }
    return kExitOk;
  } catch (const bdrygp::BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const bdrygp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
