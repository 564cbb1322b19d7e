#ifndef BETCS_CORE_HPP
#define BETCS_CORE_HPP

#include <cstdint>
#include <optional>
#include <vector>

namespace betcs {

inline constexpr double kDefaultCap = 0.5;
inline constexpr int kDefaultGridSize = 1000;

/// Error level alpha in (0,1). Wealth thresholds are 1/alpha.
class Confidence {
 public:
  explicit Confidence(double alpha);
  double alpha() const { return alpha_; }
  double log_2_over_alpha() const;

 private:
  double alpha_;
};

/// Closed interval [lo, hi]; lo > hi encodes the empty set.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  bool empty() const { return lo > hi; }
  double width() const { return empty() ? 0.0 : hi - lo; }
  bool contains(double x) const { return !empty() && lo <= x && x <= hi; }
  Interval intersect(const Interval& other) const;
  Interval clip_to_unit() const;

  static Interval whole() { return {0.0, 1.0}; }
  static Interval none() { return {1.0, 0.0}; }
};

/// Streaming mean/variance estimates with shrinkage:
///   mean     = (1/2 + sum x_i) / (t + 1)
///   variance = (var_pseudo + sum (x_i - mean_i)^2) / (t + 1)
/// where mean_i is the estimate *including* x_i. Fresh state has mean 1/2
/// and variance var_pseudo (1/4 by default), so variance() > 0 always.
class RunningMoments {
 public:
  explicit RunningMoments(double var_pseudo = 0.25);

  void update(double x);  // requires x in [0,1]

  std::int64_t count() const { return t_; }
  double sum() const { return sum_x_; }
  double mean() const { return (0.5 + sum_x_) / static_cast<double>(t_ + 1); }
  double variance() const {
    return (var_pseudo_ + sum_sq_dev_) / static_cast<double>(t_ + 1);
  }
  double sum_sq_dev() const { return sum_sq_dev_; }

 private:
  std::int64_t t_ = 0;
  double sum_x_ = 0.0;
  double sum_sq_dev_ = 0.0;
  double var_pseudo_;
};

/// psi_H(lambda) = lambda^2 / 8, valid for any real lambda.
double psi_hoeffding(double lambda);

/// psi_E(lambda) = (-log(1 - lambda) - lambda) / 4 for lambda in [0, 1).
/// Nonnegative, increasing; psi_E/psi_H -> 1 as lambda -> 0+.
double psi_exponential(double lambda);

enum class FanMode { basic, pos, neg };

/// Lower bound on log(1 + lambda*y).
///   basic: y >= -1,  lambda in [0,1):           lambda*y - 4*psi_E(lambda)*y^2
///   pos:   y >= -m,  lambda in [0, 1/m):        lambda*y + (y/m)^2*(log(1-m*lambda) + m*lambda)
///   neg:   y <= 1-m, lambda in (-1/(1-m), 0]:   lambda*y + (y/(1-m))^2*(log(1+(1-m)*lambda) - (1-m)*lambda)
/// Arguments outside the mode's domain throw std::domain_error.
double fan_bound(double y, double lambda, double m, FanMode mode);

enum class ScheduleKind { pm_h, pm_eb, va_eb, pm_plus_minus, constant };

/// Predictable lambda-sequence: the emission for time t is a function of the
/// moment state over x_1..x_{t-1} only.
///
///   pm_h:          sqrt(8 log(2/a) / (t log(t+1)))            capped at 1
///   pm_eb:         sqrt(2 log(2/a) / (var_{t-1} t log(t+1)))  capped at c
///   va_eb:         sqrt(2 log(2/a) / (n var_{t-1}))           capped at c, needs horizon n
///   pm_plus_minus: as pm_eb without the cap (m-dependent caps are applied by
///                  the consumer); with a horizon set, the t log(t+1) factor
///                  is replaced by n (fixed-sample variant)
///   constant:      a fixed value
class LambdaSchedule {
 public:
  static LambdaSchedule pm_h();
  static LambdaSchedule pm_eb(double cap = kDefaultCap);
  static LambdaSchedule va_eb(std::int64_t horizon, double cap = kDefaultCap);
  static LambdaSchedule pm_plus_minus();
  static LambdaSchedule pm_plus_minus_fixed(std::int64_t horizon);
  static LambdaSchedule constant(double value);

  /// Lambda for the next observation given moments of everything seen so far.
  double next(const RunningMoments& before, Confidence alpha) const;

  ScheduleKind kind() const { return kind_; }
  double cap() const { return cap_; }

 private:
  LambdaSchedule(ScheduleKind kind, double cap, std::optional<std::int64_t> horizon,
                 double value);

  ScheduleKind kind_;
  double cap_;
  std::optional<std::int64_t> horizon_;
  double value_;  // constant schedules only
};

/// Grid of g evenly spaced points over [lo, hi], endpoints included.
std::vector<double> linear_grid(double lo, double hi, int g);

/// Convex hull of the marked grid points, optionally widened by one grid
/// spacing on each side (then clipped to the grid's range). No marks yields
/// the empty interval.
Interval grid_hull(const std::vector<bool>& member, const std::vector<double>& grid,
                   bool widen_by_spacing);

}  // namespace betcs

#endif  // BETCS_CORE_HPP
