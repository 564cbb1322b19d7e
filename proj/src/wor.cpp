#include "betcs/wor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace betcs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct HedgedWorTracker {
  double log_plus = 0.0;
  double log_minus = 0.0;
  bool rejected = false;
};

// One hedged wealth update against candidate mean m given the pre-observation
// sampling state. Returns false once the null is deterministically refuted.
void hedged_wor_step(HedgedWorTracker& tracker, const WorState& before, double x,
                     double lam_plus_raw, double lam_minus_raw, double m, double cap) {
  if (tracker.rejected) return;
  const double mw = wor_cond_mean(before, m);
  if (!(mw >= 0.0 && mw <= 1.0)) {
    tracker.rejected = true;
    return;
  }
  if (mw == 0.0 || mw == 1.0) {
    if (x != mw) tracker.rejected = true;
    return;
  }
  const double lam_plus = std::min(lam_plus_raw, cap / mw);
  const double lam_minus = std::min(lam_minus_raw, cap / (1.0 - mw));
  tracker.log_plus += std::log1p(std::max(lam_plus * (x - mw), -1.0));
  tracker.log_minus += std::log1p(std::max(-lam_minus * (x - mw), -1.0));
}

bool hedged_wor_member(const HedgedWorTracker& tracker, double log_theta,
                       double log_one_minus_theta, double log_threshold) {
  if (tracker.rejected) return false;
  const double stat = std::max(log_theta + tracker.log_plus,
                               log_one_minus_theta + tracker.log_minus);
  return stat < log_threshold;
}

void validate_wor_input(std::span<const double> xs, std::int64_t population_size) {
  if (xs.empty()) throw std::invalid_argument("empty input sequence");
  if (population_size < 1) throw std::invalid_argument("population size must be positive");
  if (static_cast<std::int64_t>(xs.size()) > population_size) {
    throw std::invalid_argument("more observations than population");
  }
}

}  // namespace

WorState::WorState(std::int64_t population_size) : population_size_(population_size) {
  if (population_size < 1) {
    throw std::invalid_argument("population size must be positive");
  }
}

void WorState::observe(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("observation outside [0,1]");
  if (seen_ >= population_size_) {
    throw std::invalid_argument("more observations than population");
  }
  running_sum_ += x;
  ++seen_;
}

double wor_cond_mean(const WorState& state, double m) {
  if (state.seen() >= state.population_size()) {
    throw std::invalid_argument("population exhausted");
  }
  const double numer = static_cast<double>(state.population_size()) * m - state.running_sum();
  return numer / static_cast<double>(state.population_size() - state.seen());
}

void WorCapitalTracker::step(const WorState& before, double x, double lambda, double m) {
  if (rejected_) return;
  const double mw = wor_cond_mean(before, m);
  if (!(mw >= 0.0 && mw <= 1.0)) {
    rejected_ = true;
    return;
  }
  if (mw == 0.0 || mw == 1.0) {
    if (x != mw) rejected_ = true;
    return;
  }
  const double slack = 1e-12;
  if (lambda > 1.0 / mw + slack || lambda < -1.0 / (1.0 - mw) - slack) {
    throw std::domain_error("bet outside [-1/(1-m_t), 1/m_t]");
  }
  capital_.multiply_by(std::max(1.0 + lambda * (x - mw), 0.0));
}

void wor_capital_step(WorCapitalTracker& tracker, const WorState& before, double x,
                      double lambda, double m) {
  tracker.step(before, x, lambda, m);
}

ConfSeqRecord hedged_wor_cs(std::span<const double> xs, std::int64_t population_size,
                            Confidence alpha, const BettingConfig& cfg,
                            const LambdaSchedule& dot_schedule) {
  validate_wor_input(xs, population_size);
  if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0)) throw std::invalid_argument("theta in [0,1]");
  if (!(cfg.cap > 0.0 && cfg.cap <= 1.0)) throw std::invalid_argument("cap in (0,1]");

  ConfSeqRecord record;
  record.method = "hedged-wor";
  record.alpha = alpha.alpha();
  const auto grid = linear_grid(0.0, 1.0, cfg.grid_size);
  const double log_threshold = -std::log(alpha.alpha());
  const double log_theta = std::log(cfg.theta);
  const double log_one_minus_theta = std::log(1.0 - cfg.theta);

  std::vector<HedgedWorTracker> trackers(grid.size());
  std::vector<bool> member(grid.size(), false);
  WorState state(population_size);
  RunningMoments moments;
  Interval running = Interval::whole();
  double x_min = kInf, x_max = -kInf;

  for (double x : xs) {
    const double dot = std::fabs(dot_schedule.next(moments, alpha));
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      hedged_wor_step(trackers[i], state, x, dot, dot, grid[i], cfg.cap);
      member[i] = hedged_wor_member(trackers[i], log_theta, log_one_minus_theta,
                                    log_threshold);
    }
    // Announced means of exactly 0 or 1 pin the whole population.
    member.front() = member.front() && !(x_max > 0.0);
    member.back() = member.back() && !(x_min < 1.0);
    state.observe(x);
    moments.update(x);

    const Interval raw = grid_hull(member, grid, /*widen_by_spacing=*/true);
    running = running.intersect(raw);
    record.raw.push_back(raw);
    record.intersected.push_back(running);
  }
  return record;
}

Interval hedged_wor_ci(std::span<const double> xs, std::int64_t population_size,
                       std::int64_t n, Confidence alpha, const BettingConfig& cfg) {
  if (n < 1 || n > static_cast<std::int64_t>(xs.size())) {
    throw std::invalid_argument("sample size must lie in [1, observations]");
  }
  if (n > population_size) throw std::invalid_argument("sample exceeds population");
  const auto record =
      hedged_wor_cs(xs.subspan(0, static_cast<std::size_t>(n)), population_size, alpha,
                    cfg, LambdaSchedule::pm_plus_minus_fixed(n));
  return record.intersected.back();
}

ConfSeqRecord conbo_wor_cs(std::span<const double> xs, std::int64_t population_size,
                           Confidence alpha, const BettingConfig& cfg) {
  validate_wor_input(xs, population_size);
  if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0)) throw std::invalid_argument("theta in [0,1]");
  if (!(cfg.cap > 0.0 && cfg.cap <= 1.0)) throw std::invalid_argument("cap in (0,1]");

  ConfSeqRecord record;
  record.method = "conbo-wor";
  record.alpha = alpha.alpha();
  const auto grid = linear_grid(0.0, 1.0, cfg.grid_size);
  const double log_threshold = -std::log(alpha.alpha());
  const double log_theta = std::log(cfg.theta);
  const double log_one_minus_theta = std::log(1.0 - cfg.theta);

  std::vector<HedgedWorTracker> trackers(grid.size());
  std::vector<bool> member(grid.size(), false);
  WorState state(population_size);
  RunningMoments moments;
  std::vector<double> history;
  if (cfg.inner == StrategyKind::kelly) history.reserve(xs.size());
  OnsState ons_lower, ons_upper;
  Interval running = Interval::whole();
  double lower = 0.0, upper = 1.0;
  double x_min = kInf, x_max = -kInf;

  const auto inner_bet = [&](double target, OnsState& ons) {
    switch (cfg.inner) {
      case StrategyKind::kelly: return kelly_bet(history, target, cfg.cap);
      case StrategyKind::akelly: return akelly_bet(moments, target, cfg.cap);
      case StrategyKind::lbow: return lbow_bet(moments, target, cfg.cap);
      case StrategyKind::ons: return ons.bet(target, cfg.cap);
      case StrategyKind::constant:
        return std::clamp(cfg.constant_bet, bet_cap_lower(target, cfg.cap),
                          bet_cap_upper(target, cfg.cap));
    }
    throw std::logic_error("unreachable");
  };

  for (double x : xs) {
    // Bet against the conditional means of the previous interval endpoints.
    const double lower_cond = std::clamp(wor_cond_mean(state, lower), 0.0, 1.0);
    const double upper_cond = std::clamp(wor_cond_mean(state, upper), 0.0, 1.0);
    const double lam_plus_raw = std::max(inner_bet(lower_cond, ons_lower), 0.0);
    const double lam_minus_raw = std::max(-inner_bet(upper_cond, ons_upper), 0.0);

    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      hedged_wor_step(trackers[i], state, x, lam_plus_raw, lam_minus_raw, grid[i],
                      cfg.cap);
      member[i] = hedged_wor_member(trackers[i], log_theta, log_one_minus_theta,
                                    log_threshold);
    }
    member.front() = member.front() && !(x_max > 0.0);
    member.back() = member.back() && !(x_min < 1.0);

    if (cfg.inner == StrategyKind::ons) {
      ons_lower.observe(x, lower_cond, cfg.cap);
      ons_upper.observe(x, upper_cond, cfg.cap);
    }
    state.observe(x);
    moments.update(x);
    if (cfg.inner == StrategyKind::kelly) history.push_back(x);

    const Interval raw = grid_hull(member, grid, /*widen_by_spacing=*/true);
    running = running.intersect(raw);
    record.raw.push_back(raw);
    record.intersected.push_back(running);
    if (!raw.empty()) {
      lower = raw.lo;
      upper = raw.hi;
    }
  }
  return record;
}

}  // namespace betcs
