#include "bdrygp/harness.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace bdrygp;
using Catch::Matchers::WithinAbs;

TEST_CASE("test function values") {
  CHECK(eval_test_function("corner_peak", 3, {0.0, 0.0, 0.0}) == 1.0);
  CHECK_THAT(eval_test_function("corner_peak", 10, Point(10, 1.0)),
             WithinAbs(std::ldexp(1.0, -11), 1e-18));
  CHECK(eval_test_function("product_peak", 4, Point(4, 0.25)) == 1.0);
  CHECK(eval_test_function("rosenbrock", 5, Point(5, 1.0)) == 0.0);
  CHECK_THAT(eval_test_function("rosenbrock", 2, {0.0, 0.0}),
             WithinAbs(404.0, 1e-12));
  CHECK_THROWS_AS(eval_test_function("peak42", 2, {0.5, 0.5}), ConfigError);
  CHECK_THROWS_AS(eval_test_function("corner_peak", 2, {0.5, 1.5}),
                  std::domain_error);
  CHECK_THROWS_AS(eval_test_function("corner_peak", 3, {0.5, 0.5}),
                  std::domain_error);
}

TEST_CASE("mc_sample is deterministic and in the cube") {
  const auto a = mc_sample(3, 50, 99);
  const auto b = mc_sample(3, 50, 99);
  const auto c = mc_sample(3, 50, 100);
  CHECK(a == b);
  CHECK(a != c);
  for (const Point& p : a) {
    REQUIRE(p.size() == 3);
    for (double v : p) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("estimate_error") {
  auto truth = [](const Point& x) { return x[0]; };
  SECTION("identical predictor gives zero") {
    CHECK(estimate_error(truth, truth, 1, "L1", 100, 5) == 0.0);
    CHECK(estimate_error(truth, truth, 1, "Linf", 100, 5) == 0.0);
  }
  SECTION("constant offset gives |c| in L1") {
    auto shifted = [](const Point& x) { return x[0] + 0.75; };
    CHECK_THAT(estimate_error(shifted, truth, 1, "L1", 200, 5),
               WithinAbs(0.75, 1e-12));
    CHECK_THAT(estimate_error(shifted, truth, 1, "Linf", 200, 5),
               WithinAbs(0.75, 1e-12));
  }
  SECTION("zero predictor reproduces the seeded sample mean") {
    auto zero = [](const Point&) { return 0.0; };
    const double est = estimate_error(zero, truth, 1, "L1", 300, 17);
    // independent re-draw with the same seed
    double mean = 0.0;
    for (const Point& p : mc_sample(1, 300, 17)) mean += p[0];
    mean /= 300.0;
    CHECK(est == mean);
  }
  SECTION("unknown norm is a config error") {
    CHECK_THROWS_AS(estimate_error(truth, truth, 1, "L2", 10, 0), ConfigError);
  }
}

TEST_CASE("config validation") {
  StudyConfig c;
  c.function = "product_peak";
  c.d = 2;
  CHECK_NOTHROW(validate(c));

  StudyConfig bad = c;
  bad.k_min = 0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.k_max = 1;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.error_norm = "L2";
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.boundary_mode = "top";
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.function = "nope";
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.boundary_mode = "none";
  bad.family = "brownian";
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.family = "brownian";
  bad.sigma2 = 2.0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.mc_points = 0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("run_convergence_study on a small config") {
  StudyConfig c;
  c.function = "product_peak";
  c.d = 2;
  c.k_min = 2;
  c.k_max = 4;
  c.mc_points = 400;
  c.rng_seed = 7;
  const ErrorReport rep = run_convergence_study(c);
  REQUIRE(rep.rows.size() == 3);
  REQUIRE(rep.slopes.size() == 1);
  CHECK(rep.slopes[0].method == "bdrymatern-full");
  long long prev_n = 0;
  for (const ErrorRow& r : rep.rows) {
    CHECK(r.method == "bdrymatern-full");
    CHECK(r.n > prev_n);  // n strictly increasing in k
    prev_n = r.n;
    CHECK(r.seed == 7);
    CHECK(r.error > 0.0);
    CHECK(r.wall_ms > 0.0);
  }
  CHECK(rep.rows.front().error > rep.rows.back().error);
  CHECK(rep.slopes[0].slope_vs_level < 0.0);
}

TEST_CASE("a truth inside the design span gives near-zero error") {
  // Brownian GP on a full d=1 grid reproduces piecewise-linear functions
  // whose kinks sit on the grid, so the estimated error collapses
  auto truth = [](const Point& x) {
    return hat1d(2, 1, x[0]) + 0.5 * hat1d(2, 3, x[0]);
  };
  const BoundaryConfig bounds = BoundaryConfig::full(1);
  const SparseGrid sg = sparse_grid(2, 1, bounds);
  std::vector<Point> design;
  for (const auto& p : sg.points) design.push_back(p.values());
  const GPModel model =
      GPModel::fit(design, KernelParams::isotropic(1, 1.0), bounds,
                   KernelFamily::Brownian, MeanSpec(truth, bounds), truth);
  const double err = estimate_error(
      [&model](const Point& x) { return model.predict_mean(x); }, truth, 1,
      "Linf", 500, 9);
  CHECK(err <= 1e-9);
}

TEST_CASE("budget violations fail before factorization") {
  StudyConfig c;
  c.function = "corner_peak";
  c.d = 3;
  c.k_min = 2;
  c.k_max = 6;
  c.budget = 100;
  try {
    run_convergence_study(c);
    FAIL("expected BudgetError");
  } catch (const BudgetError& e) {
    // the failing level is named
    CHECK(std::string(e.what()).find("level") != std::string::npos);
  }
}

TEST_CASE("equivalence checks pass and the perturbation hook fails them") {
  SECTION("full grids, d=1, levels up to 6") {
    for (int a = 1; a <= 6; ++a) {
      const EquivReport rep =
          run_equivalence_check_full({a}, BoundaryConfig::full(1), 3);
      INFO(rep.what << " max_dev=" << rep.max_deviation);
      CHECK(rep.pass);
    }
  }
  SECTION("sparse, d=2, k=3, left boundaries") {
    const EquivReport rep =
        run_equivalence_check_sparse(3, BoundaryConfig::left_only(2), 3);
    INFO("max_dev=" << rep.max_deviation);
    CHECK(rep.pass);
    CHECK(rep.n_design > 0);
    CHECK(rep.n_queries == 200);
  }
  SECTION("kernel perturbation is detected") {
    const EquivReport rep = run_equivalence_check_full(
        {2, 2}, BoundaryConfig::full(2), 3, 1e-3);
    CHECK_FALSE(rep.pass);
    CHECK(rep.max_deviation >= 1e-4);
  }
  SECTION("needs covers_all") {
    CHECK_THROWS_AS(
        run_equivalence_check_sparse(2, BoundaryConfig::none(2), 3),
        std::invalid_argument);
  }
}

TEST_CASE("emit_report formatting") {
  SECTION("empty report is header-only") {
    std::ostringstream out;
    emit_report(ErrorReport{}, out);
    CHECK(out.str() ==
          "method,function,d,boundary_mode,level,n,error_norm,error,wall_ms,"
          "seed\n");
  }
  SECTION("rows grouped by method, sorted by level; wall_ms zeroed") {
    ErrorReport rep;
    rep.rows.push_back({"m1", "f", 2, "full", 3, 10, "L1", 0.5, 12.5, 1});
    rep.rows.push_back({"m2", "f", 2, "left", 2, 4, "L1", 0.75, 8.0, 1});
    rep.rows.push_back({"m1", "f", 2, "full", 2, 5, "L1", 1.0, 9.0, 1});
    rep.slopes.push_back({"m1", -1.0, -0.9});
    std::ostringstream out;
    emit_report(rep, out);
    const std::string expect =
        "method,function,d,boundary_mode,level,n,error_norm,error,wall_ms,"
        "seed\n"
        "m1,f,2,full,2,5,L1,1,0,1\n"
        "m1,f,2,full,3,10,L1,0.5,0,1\n"
        "m2,f,2,left,2,4,L1,0.75,0,1\n"
        "# slope method=m1 log2err_vs_k=-1 log2err_vs_log2n=-0.90000000000000002\n";
    CHECK(out.str() == expect);
  }
  SECTION("timing opt-in writes measured wall times") {
    ErrorReport rep;
    rep.rows.push_back({"m", "f", 1, "full", 2, 3, "L1", 0.5, 12.5, 0});
    std::ostringstream out;
    emit_report(rep, out, true);
    CHECK(out.str().find(",12.5,") != std::string::npos);
  }
}

TEST_CASE("studies are deterministic end to end") {
  StudyConfig c;
  c.function = "corner_peak";
  c.d = 2;
  c.k_min = 2;
  c.k_max = 3;
  c.mc_points = 200;
  c.rng_seed = 21;
  std::ostringstream a, b;
  emit_report(run_convergence_study(c), a);
  emit_report(run_convergence_study(c), b);
  CHECK(a.str() == b.str());
  CHECK(a.str().find(",0,21\n") != std::string::npos);  // wall_ms column is 0
}

TEST_CASE("merge concatenates reports") {
  ErrorReport a, b;
  a.rows.push_back({"m1", "f", 1, "full", 2, 3, "L1", 0.5, 0.0, 0});
  a.slopes.push_back({"m1", -1.0, -1.0});
  b.rows.push_back({"m2", "f", 1, "left", 2, 3, "L1", 0.6, 0.0, 0});
  b.slopes.push_back({"m2", -0.5, -0.5});
  a.merge(b);
  CHECK(a.rows.size() == 2);
  CHECK(a.slopes.size() == 2);
}

TEST_CASE("fit_slope least squares") {
  CHECK_THAT(fit_slope({1, 2, 3}, {2, 4, 6}), WithinAbs(2.0, 1e-12));
  CHECK(std::isnan(fit_slope({1}, {2})));
}
