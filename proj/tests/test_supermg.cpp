#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "betcs/core.hpp"
#include "betcs/rng.hpp"
#include "betcs/supermg.hpp"
#include "oracles.hpp"

using namespace betcs;

namespace {

std::vector<double> bernoulli_stream(double p, int n, std::uint64_t seed) {
  StreamRng rng(seed, 0);
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (auto& x : xs) x = rng.bernoulli(p);
  return xs;
}

}  // namespace

TEST_CASE("pm-h closed form with a constant schedule") {
  const Confidence alpha(0.05);
  const double lambda = 0.5;
  std::vector<double> xs(50, 0.5);
  const auto record = pm_hoeffding_cs(xs, alpha, LambdaSchedule::constant(lambda));
  const double t = 50.0;
  const double margin = (std::log(40.0) + t * lambda * lambda / 8.0) / (t * lambda);
  const auto& last = record.raw.back();
  CHECK(last.lo == doctest::Approx(0.5 - margin).epsilon(1e-12));
  CHECK(last.hi == doctest::Approx(0.5 + margin).epsilon(1e-12));

  // early on the margin dominates and the clipped set is the whole interval
  CHECK(record.raw.front().lo == 0.0);
  CHECK(record.raw.front().hi == 1.0);
}

TEST_CASE("pm-h with the fixed-sample bet recovers the Hoeffding interval") {
  const Confidence alpha(0.05);
  const int n = 100;
  const auto xs = bernoulli_stream(0.5, n, 7);
  const double lambda = std::sqrt(8.0 * std::log(40.0) / n);
  const auto record = pm_hoeffding_cs(xs, alpha, LambdaSchedule::constant(lambda));
  const auto& last = record.raw.back();
  const double margin = (last.hi - last.lo) / 2.0;
  CHECK(margin == doctest::Approx(std::sqrt(std::log(40.0) / (2.0 * n))).epsilon(1e-12));
}

TEST_CASE("pm-eb single observation") {
  const Confidence alpha(0.05);
  const std::vector<double> xs{1.0};
  const auto record = pm_eb_cs(xs, alpha, LambdaSchedule::constant(0.5));
  // v_1 = 4 (1 - 1/2)^2 = 1, so the margin is (log 40 + psi_E(1/2)) / (1/2).
  const double margin = (std::log(40.0) + psi_exponential(0.5)) / 0.5;
  CHECK(margin == doctest::Approx(7.475).epsilon(1e-3));
  const double center = 0.5 * 1.0 / 0.5;
  CHECK(record.raw.back().lo == 0.0);  // clipped: center 1, margin ~7.5
  CHECK(record.raw.back().hi == 1.0);
  CHECK(center == 1.0);
}

TEST_CASE("pm-eb margin beats pm-h on a low-variance stream") {
  const Confidence alpha(0.05);
  std::vector<double> xs(100, 0.25);
  const auto sched = LambdaSchedule::constant(0.3);
  const auto h = pm_hoeffding_cs(xs, alpha, sched);
  const auto eb = pm_eb_cs(xs, alpha, sched);
  const auto h_width = h.raw.back().width();
  const auto eb_width = eb.raw.back().width();
  CHECK(h.raw.back().lo > 0.0);  // unclipped, widths are twice the margins
  CHECK(eb_width < h_width);
}

TEST_CASE("vanishing bets blow up the margin") {
  const Confidence alpha(0.05);
  std::vector<double> xs(5, 0.5);
  const auto record = pm_eb_cs(xs, alpha, LambdaSchedule::constant(1e-8));
  CHECK(record.raw.back().lo == 0.0);
  CHECK(record.raw.back().hi == 1.0);
}

TEST_CASE("schedule emission outside (0,1) is rejected by pm-eb") {
  const Confidence alpha(0.05);
  std::vector<double> xs(5, 0.5);
  CHECK_THROWS_AS(pm_eb_cs(xs, alpha, LambdaSchedule::constant(1.0)), std::domain_error);
  CHECK_THROWS_AS(pm_eb_cs(xs, alpha, LambdaSchedule::constant(0.0)), std::domain_error);
  CHECK_THROWS_AS(pm_hoeffding_cs({}, alpha, LambdaSchedule::pm_h()), std::invalid_argument);
}

TEST_CASE("both mixture processes are supermartingales under exhaustive enumeration") {
  const Confidence alpha(0.05);
  for (double mu : {0.3, 0.5}) {
    for (int t : {6, 10}) {
      const auto pm_h_value = [&](const std::vector<double>& path) {
        RunningMoments moments;
        const auto sched = LambdaSchedule::pm_h();
        double log_m = 0.0;
        for (double x : path) {
          const double lam = sched.next(moments, alpha);
          log_m += lam * (x - mu) - psi_hoeffding(lam);
          moments.update(x);
        }
        return std::exp(log_m);
      };
      const auto pm_eb_value = [&](const std::vector<double>& path) {
        RunningMoments moments;
        const auto sched = LambdaSchedule::pm_eb(0.5);
        double log_m = 0.0;
        for (double x : path) {
          const double lam = sched.next(moments, alpha);
          const double dev = x - moments.mean();
          log_m += lam * (x - mu) - 4.0 * dev * dev * psi_exponential(lam);
          moments.update(x);
        }
        return std::exp(log_m);
      };
      CHECK(oracles::bernoulli_path_expectation(mu, t, pm_h_value) <= 1.0 + 1e-12);
      CHECK(oracles::bernoulli_path_expectation(mu, t, pm_eb_value) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("raw intervals are symmetric about the weighted mean") {
  const Confidence alpha(0.05);
  const auto xs = bernoulli_stream(0.5, 400, 21);
  const auto sched = LambdaSchedule::pm_eb(0.5);
  const auto record = pm_eb_cs(xs, alpha, sched);

  RunningMoments moments;
  double sum_lambda = 0.0, sum_lambda_x = 0.0;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    const double lam = sched.next(moments, alpha);
    sum_lambda += lam;
    sum_lambda_x += lam * xs[t];
    moments.update(xs[t]);
    const auto& raw = record.raw[t];
    if (raw.lo > 0.0 && raw.hi < 1.0) {
      CHECK((raw.lo + raw.hi) / 2.0 ==
            doctest::Approx(sum_lambda_x / sum_lambda).epsilon(1e-12));
    }
  }
}

TEST_CASE("running intersection is nested") {
  const Confidence alpha(0.05);
  const auto xs = bernoulli_stream(0.4, 300, 5);
  const auto record = pm_hoeffding_cs(xs, alpha, LambdaSchedule::pm_h());
  CHECK(record.raw.front().lo == record.intersected.front().lo);
  CHECK(record.raw.front().hi == record.intersected.front().hi);
  for (std::size_t t = 1; t < record.intersected.size(); ++t) {
    CHECK(record.intersected[t].lo >= record.intersected[t - 1].lo - 1e-15);
    CHECK(record.intersected[t].hi <= record.intersected[t - 1].hi + 1e-15);
    CHECK(record.intersected[t].lo >= record.raw[t].lo - 1e-15);
    CHECK(record.intersected[t].hi <= record.raw[t].hi + 1e-15);
  }
}

TEST_CASE("thresholding the process on a grid reproduces the closed form") {
  const Confidence alpha(0.05);
  const auto xs = bernoulli_stream(0.3, 150, 3);
  const auto sched = LambdaSchedule::pm_eb(0.5);
  const auto record = pm_eb_cs(xs, alpha, sched);

  RunningMoments moments;
  double sum_lambda = 0.0, sum_lambda_x = 0.0, sum_v_psi = 0.0;
  const auto grid = linear_grid(0.0, 1.0, 1000);
  const double spacing = 1.0 / 999.0;
  const double log_threshold = std::log(2.0 / alpha.alpha());
  for (std::size_t t = 0; t < xs.size(); ++t) {
    const double lam = sched.next(moments, alpha);
    const double dev = xs[t] - moments.mean();
    sum_lambda += lam;
    sum_lambda_x += lam * xs[t];
    sum_v_psi += 4.0 * dev * dev * psi_exponential(lam);
    moments.update(xs[t]);
    if (t % 29 != 0) continue;

    std::vector<bool> member(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double m = grid[i];
      const double log_up = sum_lambda_x - m * sum_lambda - sum_v_psi;
      const double log_down = m * sum_lambda - sum_lambda_x - sum_v_psi;
      member[i] = log_up < log_threshold && log_down < log_threshold;
    }
    const Interval hull = grid_hull(member, grid, false);
    const Interval closed = record.raw[t];
    CHECK(std::fabs(hull.lo - closed.lo) <= spacing + 1e-12);
    CHECK(std::fabs(hull.hi - closed.hi) <= spacing + 1e-12);
  }
}

TEST_CASE("pm-h raw width is data-free once unclipped") {
  const Confidence alpha(0.05);
  const auto a = pm_hoeffding_cs(bernoulli_stream(0.5, 500, 1), alpha, LambdaSchedule::pm_h());
  const auto b = pm_hoeffding_cs(bernoulli_stream(0.6, 500, 2), alpha, LambdaSchedule::pm_h());
  for (std::size_t t = 200; t < 500; ++t) {
    REQUIRE(a.raw[t].lo > 0.0);
    REQUIRE(b.raw[t].hi < 1.0);
    CHECK(a.raw[t].width() == doctest::Approx(b.raw[t].width()).epsilon(1e-12));
  }
}

TEST_CASE("pm-h width falls like sqrt(log t / t)") {
  const Confidence alpha(0.05);
  const auto record =
      pm_hoeffding_cs(bernoulli_stream(0.5, 1000, 4), alpha, LambdaSchedule::pm_h());
  const double ratio = record.raw[249].width() / record.raw[999].width();
  // rate sqrt(log t / t): quadrupling t roughly halves the width
  CHECK(ratio > 1.5);
  CHECK(ratio < 2.2);
}

TEST_CASE("va_eb_ci basics") {
  const Confidence alpha(0.05);
  const std::vector<double> one{0.7};
  const auto record = pm_eb_cs(one, alpha, LambdaSchedule::va_eb(1, 0.5));
  const Interval direct = va_eb_ci(one, alpha, 0.5);
  CHECK(direct.lo == record.intersected.back().lo);
  CHECK(direct.hi == record.intersected.back().hi);

  std::vector<double> zeros(200, 0.0);
  const Interval degenerate = va_eb_ci(zeros, alpha);
  CHECK(degenerate.lo == 0.0);
  CHECK(degenerate.hi < 0.5);
}

TEST_CASE("single identity permutation reduces to the closed-form interval") {
  const Confidence alpha(0.05);
  const auto xs = bernoulli_stream(0.5, 120, 9);
  const Interval permuted = permuted_eb_ci(xs, alpha, 1, 123, 1000);
  const auto record =
      pm_eb_cs(xs, alpha, LambdaSchedule::va_eb(static_cast<std::int64_t>(xs.size()), 0.5));
  const Interval closed = record.raw.back();
  const double spacing = 1.0 / 999.0;
  CHECK(std::fabs(permuted.lo - closed.lo) <= spacing + 1e-12);
  CHECK(std::fabs(permuted.hi - closed.hi) <= spacing + 1e-12);
}

TEST_CASE("permutation averaging keeps the sample mean with high probability") {
  const Confidence alpha(0.05);
  const auto xs = bernoulli_stream(0.5, 200, 31);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  const Interval ci = permuted_eb_ci(xs, alpha, 16, 99, 1000);
  CHECK(ci.contains(mean));
  CHECK_THROWS_AS(permuted_eb_ci(xs, alpha, 0, 1, 100), std::invalid_argument);
}
