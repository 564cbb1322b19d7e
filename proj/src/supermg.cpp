#include "betcs/supermg.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "betcs/rng.hpp"

namespace betcs {

namespace {

enum class MarginKind { hoeffding, empirical_bernstein };

ConfSeqRecord predictable_mixture_cs(std::span<const double> xs, Confidence alpha,
                                     const LambdaSchedule& sched, MarginKind kind,
                                     std::string name) {
  if (xs.empty()) throw std::invalid_argument("empty input sequence");
  ConfSeqRecord record;
  record.method = std::move(name);
  record.alpha = alpha.alpha();
  record.raw.reserve(xs.size());
  record.intersected.reserve(xs.size());

  RunningMoments moments;
  double sum_lambda = 0.0, sum_lambda_x = 0.0, sum_psi = 0.0;
  Interval running = Interval::whole();
  for (double x : xs) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("observation outside [0,1]");
    const double lambda = sched.next(moments, alpha);
    if (kind == MarginKind::hoeffding) {
      if (!(lambda > 0.0)) throw std::domain_error("schedule emission must be positive");
      sum_psi += psi_hoeffding(lambda);
    } else {
      if (!(lambda > 0.0 && lambda < 1.0)) {
        throw std::domain_error("schedule emission must lie in (0,1)");
      }
      const double dev = x - moments.mean();
      sum_psi += 4.0 * dev * dev * psi_exponential(lambda);
    }
    sum_lambda += lambda;
    sum_lambda_x += lambda * x;
    moments.update(x);

    const double center = sum_lambda_x / sum_lambda;
    const double margin = (alpha.log_2_over_alpha() + sum_psi) / sum_lambda;
    const Interval raw = Interval{center - margin, center + margin}.clip_to_unit();
    running = running.intersect(raw);
    record.raw.push_back(raw);
    record.intersected.push_back(running);
  }
  return record;
}

}  // namespace

ConfSeqRecord pm_hoeffding_cs(std::span<const double> xs, Confidence alpha,
                              const LambdaSchedule& sched) {
  return predictable_mixture_cs(xs, alpha, sched, MarginKind::hoeffding, "pm-h");
}

ConfSeqRecord pm_eb_cs(std::span<const double> xs, Confidence alpha,
                       const LambdaSchedule& sched) {
  return predictable_mixture_cs(xs, alpha, sched, MarginKind::empirical_bernstein,
                                "pm-eb");
}

Interval va_eb_ci(std::span<const double> xs, Confidence alpha, double cap) {
  const auto record =
      pm_eb_cs(xs, alpha, LambdaSchedule::va_eb(static_cast<std::int64_t>(xs.size()), cap));
  return record.intersected.back();
}

Interval permuted_eb_ci(std::span<const double> xs, Confidence alpha, int permutations,
                        std::uint64_t seed, int grid_size) {
  if (xs.empty()) throw std::invalid_argument("empty input sequence");
  if (permutations < 1) throw std::invalid_argument("need at least one permutation");

  // The final-time Bernstein process is linear in m on the log scale:
  //   log M+(m) = SLX - m*SL - SV,   log M-(m) = m*SL - SLX - SV,
  // with SL = sum lambda_i, SLX = sum lambda_i x_i, SV = sum v_i psi_E(lambda_i).
  // The mirrored process reuses lambda and v: the shrunken moments of 1-x are
  // the reflections of those of x.
  struct Sums {
    double lambda = 0.0, lambda_x = 0.0, v_psi = 0.0;
  };
  const LambdaSchedule sched =
      LambdaSchedule::va_eb(static_cast<std::int64_t>(xs.size()), kDefaultCap);

  std::vector<double> data(xs.begin(), xs.end());
  StreamRng rng(seed, 0x70657263);
  std::vector<Sums> per_permutation;
  per_permutation.reserve(static_cast<std::size_t>(permutations));
  for (int b = 0; b < permutations; ++b) {
    if (b > 0) {
      data.assign(xs.begin(), xs.end());
      rng.shuffle(data);
    }
    Sums sums;
    RunningMoments moments;
    for (double x : data) {
      if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("observation outside [0,1]");
      const double lambda = sched.next(moments, alpha);
      const double dev = x - moments.mean();
      sums.lambda += lambda;
      sums.lambda_x += lambda * x;
      sums.v_psi += 4.0 * dev * dev * psi_exponential(lambda);
      moments.update(x);
    }
    per_permutation.push_back(sums);
  }

  const double threshold = 2.0 / alpha.alpha();
  const auto grid = linear_grid(0.0, 1.0, grid_size);
  std::vector<bool> member(grid.size(), false);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double m = grid[i];
    double avg_up = 0.0, avg_down = 0.0;
    for (const Sums& s : per_permutation) {
      avg_up += std::exp(s.lambda_x - m * s.lambda - s.v_psi);
      avg_down += std::exp(m * s.lambda - s.lambda_x - s.v_psi);
    }
    avg_up /= static_cast<double>(permutations);
    avg_down /= static_cast<double>(permutations);
    member[i] = avg_up < threshold && avg_down < threshold;
  }
  return grid_hull(member, grid, /*widen_by_spacing=*/false).clip_to_unit();
}

}  // namespace betcs
