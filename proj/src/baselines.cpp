#include "betcs/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace betcs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sample_mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

void validate_unit_range(std::span<const double> xs) {
  for (double x : xs) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("observation outside [0,1]");
  }
}

Interval symmetric_clipped(double center, double margin) {
  return Interval{center - margin, center + margin}.clip_to_unit();
}

double logsumexp(const std::vector<double>& values) {
  double hi = -kInf;
  for (double v : values) hi = std::max(hi, v);
  if (hi == -kInf) return -kInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

// Plain (unshrunk) running mean with the same deviation bookkeeping as
// RunningMoments; mean before any data is taken as 1/2.
struct PlainMoments {
  std::int64_t t = 0;
  double sum_x = 0.0;
  double sum_sq_dev = 0.0;

  double mean() const { return t == 0 ? 0.5 : sum_x / static_cast<double>(t); }
  double variance() const { return (0.25 + sum_sq_dev) / static_cast<double>(t + 1); }
  void update(double x) {
    sum_x += x;
    ++t;
    const double dev = x - mean();
    sum_sq_dev += dev * dev;
  }
};

double golden_section_min(double lo, double hi, const auto& f) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-12 * std::max(1.0, std::fabs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return std::min(fc, fd);
}

}  // namespace

Interval hoeffding_ci(std::span<const double> xs, Confidence alpha) {
  if (xs.empty()) throw std::invalid_argument("empty input sequence");
  validate_unit_range(xs);
  const double n = static_cast<double>(xs.size());
  return symmetric_clipped(sample_mean(xs), std::sqrt(alpha.log_2_over_alpha() / (2.0 * n)));
}

Interval mp09_ci(std::span<const double> xs, Confidence alpha) {
  if (xs.size() < 2) throw std::invalid_argument("need at least two observations");
  validate_unit_range(xs);
  const double n = static_cast<double>(xs.size());
  const double mean = sample_mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = ss / (n - 1.0);
  const double log_term = std::log(4.0 / alpha.alpha());
  const double margin =
      std::sqrt(2.0 * var * log_term / n) + 7.0 * log_term / (3.0 * (n - 1.0));
  return symmetric_clipped(mean, margin);
}

Interval anderson_ci(std::span<const double> xs, Confidence alpha) {
  if (xs.empty()) throw std::invalid_argument("empty input sequence");
  validate_unit_range(xs);
  const std::size_t n = xs.size();
  std::vector<double> order(xs.begin(), xs.end());
  std::sort(order.begin(), order.end());
  // order_stat(i) = X_(i) with X_(0) = 0 and X_(n+1) = 1.
  const auto order_stat = [&](std::size_t i) -> double {
    if (i == 0) return 0.0;
    if (i >= n + 1) return 1.0;
    return order[i - 1];
  };
  const double eps = std::sqrt(alpha.log_2_over_alpha() / (2.0 * static_cast<double>(n)));
  double lower = 0.0, upper_loss = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double u = std::max(static_cast<double>(i) / static_cast<double>(n) - eps, 0.0);
    lower += u * (order_stat(n + 1 - i) - order_stat(n - i));
    upper_loss += u * (order_stat(i + 1) - order_stat(i));
  }
  return Interval{lower, 1.0 - upper_loss}.clip_to_unit();
}

namespace detail {

std::vector<std::pair<double, double>> bentkus_sum_atoms(int n) {
  if (n < 1) throw std::invalid_argument("need at least one observation");
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(static_cast<std::size_t>(n) + 1);
  const double log_p = std::log(0.2), log_q = std::log(0.8);
  for (int k = 0; k <= n; ++k) {
    const double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                              std::lgamma(static_cast<double>(n - k) + 1.0);
    const double prob = std::exp(log_choose + k * log_p + (n - k) * log_q);
    const double value = static_cast<double>(k) - 0.25 * static_cast<double>(n - k);
    atoms.emplace_back(value, prob);
  }
  return atoms;
}

double bentkus_tail_expectation(const std::vector<std::pair<double, double>>& atoms,
                                double y) {
  double total = 0.0;
  for (const auto& [value, prob] : atoms) {
    const double excess = value - y;
    if (excess > 0.0) total += prob * excess * excess;
  }
  return total;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("need at least one node");
  std::vector<double> nodes(static_cast<std::size_t>(n)), weights(static_cast<std::size_t>(n));
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return {nodes, weights};
}

}  // namespace detail

Interval bentkus_ci(std::span<const double> xs, Confidence alpha) {
  if (xs.empty()) throw std::invalid_argument("empty input sequence");
  validate_unit_range(xs);
  const int n = static_cast<int>(xs.size());
  const auto atoms = detail::bentkus_sum_atoms(n);

  // inf over y in [0, W] of E[(S - y)_+^2] / (W - y)^2; scanned coarsely and
  // refined because the ratio blows up as y -> W.
  const auto tail_ratio = [&](double w) {
    const double y_hi = std::min(w, static_cast<double>(n));
    const auto ratio = [&](double y) {
      const double gap = w - y;
      if (gap <= 0.0) return kInf;
      return detail::bentkus_tail_expectation(atoms, y) / (gap * gap);
    };
    double best = ratio(0.0);
    const int coarse = 256;
    double best_y = 0.0;
    for (int i = 1; i <= coarse; ++i) {
      const double y = y_hi * static_cast<double>(i) / (coarse + 1.0);
      const double r = ratio(y);
      if (r < best) {
        best = r;
        best_y = y;
      }
    }
    const double span = y_hi / (coarse + 1.0);
    best = std::min(best, golden_section_min(std::max(0.0, best_y - span),
                                             std::min(y_hi, best_y + span), ratio));
    return best;
  };

  double lo = 0.0, hi = static_cast<double>(n);
  double w_star = hi;
  if (tail_ratio(hi) <= alpha.alpha()) {
    while (hi - lo > 1e-6 * static_cast<double>(n)) {
      const double mid = 0.5 * (lo + hi);
      if (tail_ratio(mid) <= alpha.alpha()) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    w_star = hi;
  }
  const double margin = w_star / static_cast<double>(n);
  return symmetric_clipped(sample_mean(xs), margin);
}

MixtureRule MixtureRule::truncated_exponential(double lambda_max, int nodes) {
  if (!(lambda_max > 0.0)) throw std::invalid_argument("lambda_max must be positive");
  const auto [gl_nodes, gl_weights] = detail::gauss_legendre(nodes);
  MixtureRule rule;
  rule.lambdas.reserve(gl_nodes.size());
  rule.weights.reserve(gl_nodes.size());
  double total = 0.0;
  for (std::size_t j = 0; j < gl_nodes.size(); ++j) {
    const double lambda = 0.5 * lambda_max * (gl_nodes[j] + 1.0);
    const double w = gl_weights[j] * std::exp(-lambda);
    rule.lambdas.push_back(lambda);
    rule.weights.push_back(w);
    total += w;
  }
  for (double& w : rule.weights) w /= total;  // exact probability mixture
  return rule;
}

ConfSeqRecord bernoulli_mixture_cs(std::span<const double> xs, Confidence alpha,
                                   const MixtureRule& mixture, int grid_size) {
  if (xs.empty()) throw std::invalid_argument("empty input sequence");
  if (mixture.lambdas.empty() || mixture.lambdas.size() != mixture.weights.size()) {
    throw std::invalid_argument("empty or inconsistent mixture rule");
  }
  validate_unit_range(xs);

  ConfSeqRecord record;
  record.method = "bernoulli-mixture";
  record.alpha = alpha.alpha();
  const auto grid = linear_grid(0.0, 1.0, grid_size);
  const double log_threshold = std::log(2.0 / alpha.alpha());

  // log of the mixed product process at (t, sum): the factors depend on the
  // data only through t and sum x_i, so membership is closed-form per step.
  const auto log_mixture = [&](double t, double sum, double m) {
    std::vector<double> terms;
    terms.reserve(mixture.lambdas.size());
    for (std::size_t j = 0; j < mixture.lambdas.size(); ++j) {
      const double lambda = mixture.lambdas[j];
      const double log_norm = std::log(1.0 - m + m * std::exp(lambda));
      terms.push_back(std::log(mixture.weights[j]) + lambda * (sum - t * m) -
                      t * log_norm);
    }
    return logsumexp(terms);
  };

  std::vector<bool> member(grid.size(), false);
  Interval running = Interval::whole();
  double t = 0.0, sum = 0.0;
  for (double x : xs) {
    t += 1.0;
    sum += x;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double m = grid[i];
      const bool up_ok = log_mixture(t, sum, m) < log_threshold;
      const bool down_ok = log_mixture(t, t - sum, 1.0 - m) < log_threshold;
      member[i] = up_ok && down_ok;
    }
    const Interval raw = grid_hull(member, grid, /*widen_by_spacing=*/true);
    running = running.intersect(raw);
    record.raw.push_back(raw);
    record.intersected.push_back(running);
  }
  return record;
}

namespace {

struct WorBaselineSums {
  double estimator_num = 0.0;   // sum lambda_i (x_i + prefix/(N-i+1))
  double estimator_den = 0.0;   // sum lambda_i (1 + (i-1)/(N-i+1))
  double margin_num = 0.0;      // sum psi terms
  double prefix = 0.0;          // sum of x_1..x_{i-1}
};

}  // namespace

ConfSeqRecord wor_baseline_cs(std::span<const double> xs, std::int64_t population_size,
                              Confidence alpha, WorBaselineKind kind) {
  if (xs.empty()) throw std::invalid_argument("empty input sequence");
  if (static_cast<std::int64_t>(xs.size()) > population_size) {
    throw std::invalid_argument("more observations than population");
  }
  validate_unit_range(xs);

  ConfSeqRecord record;
  record.method = kind == WorBaselineKind::hoeffding ? "h-wor" : "eb-wor";
  record.alpha = alpha.alpha();
  const double log_term = alpha.log_2_over_alpha();
  const double big_n = static_cast<double>(population_size);

  WorBaselineSums sums;
  PlainMoments plain;
  Interval running = Interval::whole();
  for (std::size_t idx = 0; idx < xs.size(); ++idx) {
    const double x = xs[idx];
    const double i = static_cast<double>(idx + 1);
    double lambda;
    if (kind == WorBaselineKind::hoeffding) {
      lambda = std::min(std::sqrt(8.0 * log_term / (i * std::log(i + 1.0))), 1.0);
      sums.margin_num += psi_hoeffding(lambda);
    } else {
      lambda = std::min(
          std::sqrt(2.0 * log_term / (plain.variance() * i * std::log(i + 1.0))), 0.5);
      const double dev = x - plain.mean();
      sums.margin_num += 4.0 * dev * dev * psi_exponential(lambda);
    }
    const double correction = 1.0 / (big_n - i + 1.0);
    sums.estimator_num += lambda * (x + sums.prefix * correction);
    sums.estimator_den += lambda * (1.0 + (i - 1.0) * correction);
    sums.prefix += x;
    plain.update(x);

    const double center = sums.estimator_num / sums.estimator_den;
    const double margin = (sums.margin_num + log_term) / sums.estimator_den;
    const Interval raw = symmetric_clipped(center, margin);
    running = running.intersect(raw);
    record.raw.push_back(raw);
    record.intersected.push_back(running);
  }
  return record;
}

Interval wor_baseline_ci(std::span<const double> xs, std::int64_t population_size,
                         std::int64_t n, Confidence alpha, WorBaselineKind kind) {
  if (n < 1 || n > static_cast<std::int64_t>(xs.size())) {
    throw std::invalid_argument("sample size must lie in [1, observations]");
  }
  if (n > population_size) throw std::invalid_argument("sample exceeds population");
  const auto data = xs.subspan(0, static_cast<std::size_t>(n));
  validate_unit_range(data);
  const double log_term = alpha.log_2_over_alpha();
  const double big_n = static_cast<double>(population_size);
  const double nn = static_cast<double>(n);

  if (kind == WorBaselineKind::hoeffding) {
    // Constant bets cancel from the weighted estimator.
    double num = 0.0, den = 0.0, prefix = 0.0, correction_sum = 0.0;
    for (std::size_t idx = 0; idx < data.size(); ++idx) {
      const double i = static_cast<double>(idx + 1);
      const double correction = 1.0 / (big_n - i + 1.0);
      num += data[idx] + prefix * correction;
      den += 1.0 + (i - 1.0) * correction;
      correction_sum += (i - 1.0) * correction;
      prefix += data[idx];
    }
    const double margin =
        std::sqrt(0.5 * log_term) / (std::sqrt(nn) + correction_sum / std::sqrt(nn));
    return symmetric_clipped(num / den, margin);
  }

  RunningMoments moments;  // shrunken moments, per the fixed-sample recipe
  double num = 0.0, den = 0.0, prefix = 0.0, margin_num = log_term;
  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    const double x = data[idx];
    const double i = static_cast<double>(idx + 1);
    const double lambda =
        std::min(std::sqrt(2.0 * log_term / (nn * moments.variance())), 0.5);
    const double dev = x - moments.mean();
    margin_num += 4.0 * dev * dev * psi_exponential(lambda);
    const double correction = 1.0 / (big_n - i + 1.0);
    num += lambda * (x + prefix * correction);
    den += lambda * (1.0 + (i - 1.0) * correction);
    prefix += x;
    moments.update(x);
  }
  return symmetric_clipped(num / den, margin_num / den);
}

}  // namespace betcs
