#include "betcs/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace betcs {

Confidence::Confidence(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("alpha must lie in (0,1)");
  }
}

double Confidence::log_2_over_alpha() const { return std::log(2.0 / alpha_); }

Interval Interval::intersect(const Interval& other) const {
  if (empty() || other.empty()) return none();
  return {std::max(lo, other.lo), std::min(hi, other.hi)};
}

Interval Interval::clip_to_unit() const {
  if (empty()) return *this;
  Interval out{std::max(lo, 0.0), std::min(hi, 1.0)};
  return out;
}

RunningMoments::RunningMoments(double var_pseudo) : var_pseudo_(var_pseudo) {
  if (!(var_pseudo > 0.0)) {
    throw std::domain_error("variance pseudo-count must be positive");
  }
}

void RunningMoments::update(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("observation outside [0,1]");
  }
  sum_x_ += x;
  ++t_;
  const double dev = x - mean();  // mean including x, per the subscripting
  sum_sq_dev_ += dev * dev;
}

double psi_hoeffding(double lambda) { return lambda * lambda / 8.0; }

double psi_exponential(double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw std::domain_error("psi_exponential requires lambda in [0,1)");
  }
  if (lambda < 1e-4) {
    // -log(1-x) - x = x^2/2 + x^3/3 + x^4/4 + ...; the direct form cancels.
    return lambda * lambda * (0.5 + lambda * (1.0 / 3.0 + lambda * 0.25)) / 4.0;
  }
  return (-std::log1p(-lambda) - lambda) / 4.0;
}

double fan_bound(double y, double lambda, double m, FanMode mode) {
  switch (mode) {
    case FanMode::basic: {
      if (!(y >= -1.0) || !(lambda >= 0.0 && lambda < 1.0)) {
        throw std::domain_error("fan_bound(basic): need y >= -1, lambda in [0,1)");
      }
      return lambda * y - 4.0 * psi_exponential(lambda) * y * y;
    }
    case FanMode::pos: {
      if (!(m > 0.0) || !(y >= -m) || !(lambda >= 0.0 && lambda < 1.0 / m)) {
        throw std::domain_error("fan_bound(pos): need y >= -m, lambda in [0,1/m)");
      }
      const double r = y / m;
      return lambda * y + r * r * (std::log1p(-m * lambda) + m * lambda);
    }
    case FanMode::neg: {
      if (!(m < 1.0) || !(y <= 1.0 - m) ||
          !(lambda <= 0.0 && lambda > -1.0 / (1.0 - m))) {
        throw std::domain_error(
            "fan_bound(neg): need y <= 1-m, lambda in (-1/(1-m),0]");
      }
      const double r = y / (1.0 - m);
      return lambda * y + r * r * (std::log1p((1.0 - m) * lambda) - (1.0 - m) * lambda);
    }
  }
  throw std::logic_error("unreachable");
}

LambdaSchedule::LambdaSchedule(ScheduleKind kind, double cap,
                               std::optional<std::int64_t> horizon, double value)
    : kind_(kind), cap_(cap), horizon_(horizon), value_(value) {}

LambdaSchedule LambdaSchedule::pm_h() {
  return {ScheduleKind::pm_h, 1.0, std::nullopt, 0.0};
}

LambdaSchedule LambdaSchedule::pm_eb(double cap) {
  if (!(cap > 0.0 && cap < 1.0)) {
    throw std::invalid_argument("pm_eb cap must lie in (0,1)");
  }
  return {ScheduleKind::pm_eb, cap, std::nullopt, 0.0};
}

LambdaSchedule LambdaSchedule::va_eb(std::int64_t horizon, double cap) {
  if (horizon < 1) throw std::invalid_argument("va_eb requires a horizon");
  if (!(cap > 0.0 && cap < 1.0)) {
    throw std::invalid_argument("va_eb cap must lie in (0,1)");
  }
  return {ScheduleKind::va_eb, cap, horizon, 0.0};
}

LambdaSchedule LambdaSchedule::pm_plus_minus() {
  return {ScheduleKind::pm_plus_minus, 0.0, std::nullopt, 0.0};
}

LambdaSchedule LambdaSchedule::pm_plus_minus_fixed(std::int64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("fixed-sample schedule requires a horizon");
  return {ScheduleKind::pm_plus_minus, 0.0, horizon, 0.0};
}

LambdaSchedule LambdaSchedule::constant(double value) {
  return {ScheduleKind::constant, 0.0, std::nullopt, value};
}

double LambdaSchedule::next(const RunningMoments& before, Confidence alpha) const {
  const double t = static_cast<double>(before.count() + 1);
  const double log_term = alpha.log_2_over_alpha();
  switch (kind_) {
    case ScheduleKind::pm_h:
      return std::min(std::sqrt(8.0 * log_term / (t * std::log(t + 1.0))), 1.0);
    case ScheduleKind::pm_eb:
      return std::min(
          std::sqrt(2.0 * log_term / (before.variance() * t * std::log(1.0 + t))),
          cap_);
    case ScheduleKind::va_eb:
      return std::min(std::sqrt(2.0 * log_term /
                                (static_cast<double>(*horizon_) * before.variance())),
                      cap_);
    case ScheduleKind::pm_plus_minus:
      if (horizon_) {
        return std::sqrt(2.0 * log_term /
                         (static_cast<double>(*horizon_) * before.variance()));
      }
      return std::sqrt(2.0 * log_term / (before.variance() * t * std::log(t + 1.0)));
    case ScheduleKind::constant:
      return value_;
  }
  throw std::logic_error("unreachable");
}

std::vector<double> linear_grid(double lo, double hi, int g) {
  if (g < 2) throw std::invalid_argument("grid needs at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(g));
  const double step = (hi - lo) / static_cast<double>(g - 1);
  for (int i = 0; i < g; ++i) grid[static_cast<std::size_t>(i)] = lo + step * i;
  grid.back() = hi;
  return grid;
}

Interval grid_hull(const std::vector<bool>& member, const std::vector<double>& grid,
                   bool widen_by_spacing) {
  if (member.size() != grid.size()) {
    throw std::invalid_argument("membership mask and grid differ in length");
  }
  std::size_t first = member.size(), last = 0;
  for (std::size_t i = 0; i < member.size(); ++i) {
    if (member[i]) {
      if (first == member.size()) first = i;
      last = i;
    }
  }
  if (first == member.size()) return Interval::none();
  Interval hull{grid[first], grid[last]};
  if (widen_by_spacing && grid.size() >= 2) {
    const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
    hull.lo = std::max(grid.front(), hull.lo - h);
    hull.hi = std::min(grid.back(), hull.hi + h);
  }
  return hull;
}

}  // namespace betcs
