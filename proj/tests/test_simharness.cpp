#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "betcs/core.hpp"
#include "betcs/simharness.hpp"

using namespace betcs;

TEST_CASE("streams are a pure function of seed and replicate") {
  ScenarioSpec spec;
  spec.family = ScenarioSpec::Family::beta;
  spec.beta_a = 10;
  spec.beta_b = 30;
  spec.horizon = 500;
  spec.seed = 17;
  const auto a = make_stream(spec, 3);
  const auto b = make_stream(spec, 3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  const auto other = make_stream(spec, 4);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a[i] != other[i];
  CHECK(differs);
}

TEST_CASE("beta sampling hits the right mean") {
  ScenarioSpec spec;
  spec.family = ScenarioSpec::Family::beta;
  spec.beta_a = 10;
  spec.beta_b = 30;
  spec.horizon = 100000;
  spec.seed = 5;
  const auto xs = make_stream(spec, 0);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) /
                      static_cast<double>(xs.size());
  CHECK(mean == doctest::Approx(0.25).epsilon(0.02));
  CHECK(std::fabs(mean - 0.25) < 0.005);
  for (double x : xs) {
    REQUIRE(x >= 0.0);
    REQUIRE(x <= 1.0);
  }
}

TEST_CASE("bernoulli(1) is all ones") {
  ScenarioSpec spec;
  spec.p = 1.0;
  spec.horizon = 50;
  const auto xs = make_stream(spec, 0);
  for (double x : xs) CHECK(x == 1.0);
}

TEST_CASE("wor streams preserve the population multiset") {
  ScenarioSpec spec;
  spec.family = ScenarioSpec::Family::wor_population;
  spec.population = {0.0, 0.0, 1.0, 1.0, 1.0};
  spec.horizon = 5;
  auto xs = make_stream(spec, 2);
  std::sort(xs.begin(), xs.end());
  CHECK(xs == std::vector<double>{0.0, 0.0, 1.0, 1.0, 1.0});
}

TEST_CASE("non-iid switch changes support") {
  ScenarioSpec spec;
  spec.family = ScenarioSpec::Family::non_iid_switch;
  spec.switch_at = 20;
  spec.horizon = 60;
  const auto xs = make_stream(spec, 0);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(xs[i] > 0.0);
    CHECK(xs[i] < 1.0);
  }
  for (std::size_t i = 20; i < 60; ++i) CHECK((xs[i] == 0.0 || xs[i] == 1.0));
  CHECK(spec.true_mean() == 0.5);
}

TEST_CASE("scenario validation") {
  ScenarioSpec bad;
  bad.family = ScenarioSpec::Family::discrete;
  bad.atoms = {0.5};
  CHECK_THROWS_AS(make_stream(bad, 0), std::invalid_argument);
  bad.atoms = {0.5, 1.5};
  bad.atom_weights = {1.0, 1.0};
  CHECK_THROWS_AS(make_stream(bad, 0), std::invalid_argument);

  ScenarioSpec empty_pop;
  empty_pop.family = ScenarioSpec::Family::wor_population;
  CHECK_THROWS_AS(make_stream(empty_pop, 0), std::invalid_argument);
}

TEST_CASE("method registry dispatch") {
  CHECK(is_cs_method("hedged"));
  CHECK(is_cs_method("hedged-wor"));
  CHECK(!is_cs_method("hedged-ci"));
  CHECK(is_ci_method("hedged-ci"));
  CHECK(is_wor_method("eb-wor-ci"));
  CHECK(!is_wor_method("pm-h"));

  std::vector<double> xs(20, 0.5);
  MethodOptions opts;
  CHECK_THROWS_AS(run_cs_method("nope", xs, Confidence(0.05), opts),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_cs_method("hedged-wor", xs, Confidence(0.05), opts),
                  std::invalid_argument);  // missing population size
  opts.betting.grid_size = 100;
  const auto record = run_cs_method("pm-eb", xs, Confidence(0.05), opts);
  CHECK(record.raw.size() == xs.size());
  const auto ci = run_ci_method("hoeffding", xs, Confidence(0.05), opts);
  CHECK(ci.contains(0.5));
}

TEST_CASE("coverage experiment") {
  ScenarioSpec spec;
  spec.p = 0.5;
  spec.horizon = 200;
  spec.replicates = 60;
  spec.seed = 11;

  const std::vector<std::string> methods{"trivial", "pm-h"};
  const auto rows = coverage_experiment(spec, methods, Confidence(0.05));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].method == "trivial");
  CHECK(rows[0].miscoverage == 0.0);
  CHECK(rows[0].std_error == 0.0);
  CHECK(rows[1].miscoverage <= 0.08);
  CHECK(rows[1].replicates == 60);
}

TEST_CASE("coverage stays controlled at a large alpha") {
  ScenarioSpec spec;
  spec.p = 0.5;
  spec.horizon = 300;
  spec.replicates = 300;
  spec.seed = 23;
  MethodOptions opts;
  opts.betting.grid_size = 200;
  const std::vector<std::string> methods{"hedged"};
  const auto rows = coverage_experiment(spec, methods, Confidence(0.5), opts);
  CHECK(rows.front().miscoverage <= 0.53);
}

TEST_CASE("betting sequences stay valid on non-iid streams") {
  // low-variance start, then maximal variance; the mean never moves
  ScenarioSpec spec;
  spec.family = ScenarioSpec::Family::non_iid_switch;
  spec.switch_at = 250;
  spec.horizon = 600;
  spec.replicates = 100;
  spec.seed = 37;
  MethodOptions opts;
  opts.betting.grid_size = 200;
  const std::vector<std::string> methods{"hedged"};
  const auto rows = coverage_experiment(spec, methods, Confidence(0.05), opts);
  CHECK(rows.front().miscoverage <= 0.08);
}

TEST_CASE("width experiment ranks hedged ahead of the mixtures") {
  ScenarioSpec spec;
  spec.family = ScenarioSpec::Family::beta;
  spec.beta_a = 10;
  spec.beta_b = 30;
  spec.horizon = 500;
  spec.replicates = 3;
  spec.seed = 2;
  MethodOptions opts;
  opts.betting.grid_size = 300;
  const std::vector<std::string> methods{"hedged", "pm-h"};
  const std::vector<std::int64_t> checkpoints{100, 500};
  const auto rows = width_experiment(spec, methods, Confidence(0.05), checkpoints, opts);
  REQUIRE(rows.size() == 4);
  // rows are (hedged, 100), (hedged, 500), (pm-h, 100), (pm-h, 500)
  CHECK(rows[1].mean_width < rows[3].mean_width);
  CHECK(rows[0].mean_width > rows[1].mean_width);  // widths shrink with t

  // CI methods are recomputed per checkpoint
  const std::vector<std::string> ci_methods{"hoeffding"};
  const auto ci_rows = width_experiment(spec, ci_methods, Confidence(0.05), checkpoints, opts);
  REQUIRE(ci_rows.size() == 2);
  CHECK(ci_rows[0].mean_width > ci_rows[1].mean_width);
}

TEST_CASE("bench timings scale with work") {
  const std::vector<std::string> methods{"hedged"};
  const auto small_grid = bench_timings(methods, 2000, 100, 3);
  const auto large_grid = bench_timings(methods, 2000, 1000, 3);
  REQUIRE(small_grid.size() == 1);
  CHECK(small_grid[0].seconds > 0.0);
  const double grid_ratio = large_grid[0].seconds / small_grid[0].seconds;
  CHECK(grid_ratio > 3.0);
  CHECK(grid_ratio < 40.0);

  const auto short_run = bench_timings(methods, 2000, 500, 3);
  const auto long_run = bench_timings(methods, 4000, 500, 3);
  const double t_ratio = long_run[0].seconds / short_run[0].seconds;
  CHECK(t_ratio > 1.2);
  CHECK(t_ratio < 5.0);
}

TEST_CASE("csv output round-trips") {
  const std::string path = "betcs_test_roundtrip.csv";
  const std::vector<std::string> header{"method", "t", "value"};
  const std::vector<std::vector<std::string>> rows{
      {"hedged", "10", format_sig(0.123456789)},
      {"pm-h", "20", format_sig(1096.123456789)},
  };
  write_csv(path, header, rows);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "method,t,value");
  std::getline(in, line);
  CHECK(line == "hedged,10,0.123457");
  std::getline(in, line);
  CHECK(line == "pm-h,20,1096.12");
  CHECK(!std::getline(in, line));
  std::remove(path.c_str());
}

TEST_CASE("significant-digit formatting") {
  CHECK(format_sig(0.5) == "0.5");
  CHECK(format_sig(1.0 / 3.0) == "0.333333");
  CHECK(format_sig(1.0 / 3.0, 3) == "0.333");
  CHECK(format_sig(0.0) == "0");
  CHECK(format_sig(123456789.0) == "1.23457e+08");
}

TEST_CASE("thread count respects the environment") {
  CHECK(thread_count() >= 1);
}
