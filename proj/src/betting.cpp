#include "betcs/betting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace betcs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kKellyBetBound = 1e6;   // finite bracket when a cap is infinite
constexpr double kKellyEdgeInset = 1e-9;
constexpr double kKellyScoreTol = 1e-10;
const double kOnsStep = 2.0 / (2.0 - std::log(3.0));

double logsumexp2(double a, double b) {
  const double hi = std::max(a, b);
  if (hi == -kInf) return -kInf;
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void validate_config(const BettingConfig& cfg) {
  if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0)) {
    throw std::invalid_argument("theta must lie in [0,1]");
  }
  if (!(cfg.cap > 0.0 && cfg.cap <= 1.0)) {
    throw std::invalid_argument("cap must lie in (0,1]");
  }
  if (cfg.grid_size < 2) throw std::invalid_argument("grid needs at least 2 points");
}

// Shared scaffolding for grid-evaluated confidence sequences over candidate
// means in [0,1]. Interior membership comes from the caller; the endpoints
// are resolved by the degenerate-mean rule.
class GridCsBuilder {
 public:
  GridCsBuilder(Confidence alpha, int grid_size, std::string method)
      : grid_(linear_grid(0.0, 1.0, grid_size)), member_(grid_.size(), false) {
    record_.method = std::move(method);
    record_.alpha = alpha.alpha();
  }

  const std::vector<double>& grid() const { return grid_; }
  std::size_t interior_begin() const { return 1; }
  std::size_t interior_end() const { return grid_.size() - 1; }

  void note_observation(double x) {
    x_min_ = std::min(x_min_, x);
    x_max_ = std::max(x_max_, x);
  }

  void set_member(std::size_t i, bool in) { member_[i] = in; }

  void commit_step(bool widen) {
    member_.front() = !reject_at_endpoint(x_max_, x_min_, 0.0);
    member_.back() = !reject_at_endpoint(x_max_, x_min_, 1.0);
    last_raw_ = grid_hull(member_, grid_, widen);
    running_ = running_.intersect(last_raw_);
    record_.raw.push_back(last_raw_);
    record_.intersected.push_back(running_);
  }

  const Interval& last_raw() const { return last_raw_; }
  ConfSeqRecord take() { return std::move(record_); }

 private:
  std::vector<double> grid_;
  std::vector<bool> member_;
  Interval running_ = Interval::whole();
  Interval last_raw_ = Interval::whole();
  double x_min_ = kInf;
  double x_max_ = -kInf;
  ConfSeqRecord record_;
};

double clamp_bet(double lambda, double m, double cap) {
  return std::clamp(lambda, bet_cap_lower(m, cap), bet_cap_upper(m, cap));
}

// Hedged membership statistic in log space.
double hedged_stat(double log_theta, double log_one_minus_theta, double log_plus,
                   double log_minus, bool use_sum) {
  const double a = log_theta + log_plus;
  const double b = log_one_minus_theta + log_minus;
  return use_sum ? logsumexp2(a, b) : std::max(a, b);
}

// Inner game strategy state for ConBo. ONS keeps one track per boundary; the
// others are memoryless functions of the shared moments/history.
struct ConboInner {
  StrategyKind kind;
  double cap;
  double constant_bet;
  RunningMoments moments;
  std::vector<double> history;
  OnsState ons_lower, ons_upper;

  double bet_at(double m, bool lower_track) {
    switch (kind) {
      case StrategyKind::kelly:
        return kelly_bet(history, m, cap);
      case StrategyKind::akelly:
        return akelly_bet(moments, m, cap);
      case StrategyKind::lbow:
        return lbow_bet(moments, m, cap);
      case StrategyKind::ons:
        return (lower_track ? ons_lower : ons_upper).bet(m, cap);
      case StrategyKind::constant:
        return clamp_bet(constant_bet, m, cap);
    }
    throw std::logic_error("unreachable");
  }

  void observe(double x, double lower_used, double upper_used) {
    if (kind == StrategyKind::ons) {
      ons_lower.observe(x, lower_used, cap);
      ons_upper.observe(x, upper_used, cap);
    }
    moments.update(x);
    if (kind == StrategyKind::kelly) history.push_back(x);
  }
};

}  // namespace

void LogCapital::multiply_by(double factor) {
  if (!(factor >= 0.0)) throw std::domain_error("wealth factor must be nonnegative");
  if (factor == 0.0) {
    log_value_ = -kInf;
    return;
  }
  log_value_ += std::log(factor);
}

double bet_cap_upper(double m, double cap) { return m > 0.0 ? cap / m : kInf; }

double bet_cap_lower(double m, double cap) {
  return m < 1.0 ? -cap / (1.0 - m) : -kInf;
}

void capital_step(LogCapital& capital, double x, double lambda, double m) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("observation outside [0,1]");
  const double slack = 1e-12;
  if (lambda > bet_cap_upper(m, 1.0) + slack || lambda < bet_cap_lower(m, 1.0) - slack) {
    throw std::domain_error("bet outside [-1/(1-m), 1/m]");
  }
  const double factor = 1.0 + lambda * (x - m);
  capital.multiply_by(std::max(factor, 0.0));
}

double kelly_bet(std::span<const double> history, double m, double cap) {
  if (history.empty()) return 0.0;
  double lo = std::max(bet_cap_lower(m, cap), -kKellyBetBound) + kKellyEdgeInset;
  double hi = std::min(bet_cap_upper(m, cap), kKellyBetBound) - kKellyEdgeInset;
  if (!(lo < hi)) return 0.0;

  const auto score = [&](double lambda) {
    double s = 0.0;
    for (double x : history) {
      const double y = x - m;
      s += y / (1.0 + lambda * y);
    }
    return s;
  };

  // The score is strictly decreasing in lambda; same-signed endpoints mean
  // the root lies beyond the truncation range.
  if (score(lo) <= 0.0) return lo;
  if (score(hi) >= 0.0) return hi;
  double a = lo, b = hi;
  while (b - a > 1e-12) {
    const double mid = 0.5 * (a + b);
    const double s = score(mid);
    if (std::fabs(s) <= kKellyScoreTol) return mid;
    if (s > 0.0) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

double akelly_bet(const RunningMoments& moments, double m, double cap) {
  const double gap = moments.mean() - m;
  const double raw = gap / (moments.variance() + gap * gap);
  return clamp_bet(raw, m, cap);
}

double lbow_bet(const RunningMoments& moments, double m, double cap) {
  const double gap = moments.mean() - m;
  const double w = gap >= 0.0 ? m : 1.0 - m;
  const double raw = gap / (w * std::fabs(gap) + moments.variance() + gap * gap);
  return clamp_bet(raw, m, cap);
}

double OnsState::bet(double m, double cap) const { return clamp_bet(lambda_, m, cap); }

void OnsState::observe(double x, double m, double cap) {
  const double placed = bet(m, cap);
  const double y = x - m;
  const double z = y / (1.0 + y * placed);  // ascent direction on log wealth
  sum_sq_grad_ += z * z;
  const double a = 1.0 + sum_sq_grad_;
  lambda_ = clamp_bet(placed + kOnsStep * z / a, m, cap);
}

std::vector<double> strategy_log_capital(std::span<const double> xs, double m,
                                         StrategyKind kind, double cap,
                                         double constant_bet) {
  std::vector<double> out;
  out.reserve(xs.size());
  LogCapital capital;
  RunningMoments moments;
  std::vector<double> history;
  if (kind == StrategyKind::kelly) history.reserve(xs.size());
  OnsState ons;
  for (double x : xs) {
    double lambda = 0.0;
    switch (kind) {
      case StrategyKind::kelly:
        lambda = kelly_bet(history, m, cap);
        break;
      case StrategyKind::akelly:
        lambda = akelly_bet(moments, m, cap);
        break;
      case StrategyKind::lbow:
        lambda = lbow_bet(moments, m, cap);
        break;
      case StrategyKind::ons:
        lambda = ons.bet(m, cap);
        break;
      case StrategyKind::constant:
        lambda = clamp_bet(constant_bet, m, cap);
        break;
    }
    capital_step(capital, x, lambda, m);
    out.push_back(capital.log_value());
    if (kind == StrategyKind::ons) ons.observe(x, m, cap);
    moments.update(x);
    if (kind == StrategyKind::kelly) history.push_back(x);
  }
  return out;
}

ConfSeqRecord betting_strategy_cs(std::span<const double> xs, Confidence alpha,
                                  StrategyKind kind, const BettingConfig& cfg) {
  validate_config(cfg);
  if (xs.empty()) throw std::invalid_argument("empty input sequence");

  const char* name = "strategy";
  switch (kind) {
    case StrategyKind::kelly: name = "kelly"; break;
    case StrategyKind::akelly: name = "akelly"; break;
    case StrategyKind::lbow: name = "lbow"; break;
    case StrategyKind::ons: name = "ons"; break;
    case StrategyKind::constant: name = "constant"; break;
  }
  GridCsBuilder builder(alpha, cfg.grid_size, name);
  const auto& grid = builder.grid();
  const double log_threshold = -std::log(alpha.alpha());

  std::vector<LogCapital> capitals(grid.size());
  std::vector<OnsState> ons;
  if (kind == StrategyKind::ons) ons.resize(grid.size());
  RunningMoments moments;
  std::vector<double> history;
  if (kind == StrategyKind::kelly) history.reserve(xs.size());

  for (double x : xs) {
    builder.note_observation(x);
    for (std::size_t i = builder.interior_begin(); i < builder.interior_end(); ++i) {
      const double m = grid[i];
      double lambda = 0.0;
      switch (kind) {
        case StrategyKind::kelly: lambda = kelly_bet(history, m, cfg.cap); break;
        case StrategyKind::akelly: lambda = akelly_bet(moments, m, cfg.cap); break;
        case StrategyKind::lbow: lambda = lbow_bet(moments, m, cfg.cap); break;
        case StrategyKind::ons: lambda = ons[i].bet(m, cfg.cap); break;
        case StrategyKind::constant: lambda = clamp_bet(cfg.constant_bet, m, cfg.cap); break;
      }
      capitals[i].multiply_by(std::max(1.0 + lambda * (x - m), 0.0));
      if (kind == StrategyKind::ons) ons[i].observe(x, m, cfg.cap);
      builder.set_member(i, capitals[i].log_value() < log_threshold);
    }
    moments.update(x);
    if (kind == StrategyKind::kelly) history.push_back(x);
    builder.commit_step(/*widen=*/true);
  }
  return builder.take();
}

ConfSeqRecord hedged_cs(std::span<const double> xs, Confidence alpha,
                        const BettingConfig& cfg, const LambdaSchedule& dot_schedule) {
  validate_config(cfg);
  if (xs.empty()) throw std::invalid_argument("empty input sequence");

  GridCsBuilder builder(alpha, cfg.grid_size, cfg.use_sum ? "hedged-sum" : "hedged");
  const auto& grid = builder.grid();
  const double log_threshold = -std::log(alpha.alpha());
  const double log_theta = std::log(cfg.theta);
  const double log_one_minus_theta = std::log(1.0 - cfg.theta);

  std::vector<double> log_plus(grid.size(), 0.0), log_minus(grid.size(), 0.0);
  RunningMoments moments;
  for (double x : xs) {
    const double dot = std::fabs(dot_schedule.next(moments, alpha));
    builder.note_observation(x);
    for (std::size_t i = builder.interior_begin(); i < builder.interior_end(); ++i) {
      const double m = grid[i];
      const double lam_plus = std::min(dot, cfg.cap / m);
      const double lam_minus = std::min(dot, cfg.cap / (1.0 - m));
      log_plus[i] += std::log1p(std::max(lam_plus * (x - m), -1.0));
      log_minus[i] += std::log1p(std::max(-lam_minus * (x - m), -1.0));
      const double stat = hedged_stat(log_theta, log_one_minus_theta, log_plus[i],
                                      log_minus[i], cfg.use_sum);
      builder.set_member(i, stat < log_threshold);
    }
    moments.update(x);
    builder.commit_step(/*widen=*/true);
  }
  return builder.take();
}

Interval hedged_ci(std::span<const double> xs, Confidence alpha,
                   const BettingConfig& cfg) {
  if (xs.empty()) throw std::invalid_argument("empty input sequence");
  const auto record = hedged_cs(
      xs, alpha, cfg,
      LambdaSchedule::pm_plus_minus_fixed(static_cast<std::int64_t>(xs.size())));
  return record.intersected.back();
}

double gkelly_capital(std::span<const double> xs, double m, int grid_bets, bool hedged,
                      double theta) {
  if (grid_bets < 1) throw std::invalid_argument("need at least one grid bet");
  if (!(m > 0.0 && m < 1.0)) {
    throw std::domain_error("grid Kelly needs a candidate mean in (0,1)");
  }
  std::vector<double> bets;
  std::vector<double> log_weights;
  if (!hedged) {
    const double lo = -1.0 / (1.0 - m), hi = 1.0 / m;
    if (grid_bets == 1) {
      bets.push_back(0.5 * (lo + hi));
    } else {
      bets = linear_grid(lo, hi, grid_bets);
    }
    log_weights.assign(bets.size(), -std::log(static_cast<double>(grid_bets)));
  } else {
    if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta in [0,1]");
    const double log_g = std::log(static_cast<double>(grid_bets));
    for (int g = 1; g <= grid_bets; ++g) {
      const double frac = static_cast<double>(g) / static_cast<double>(grid_bets);
      bets.push_back(frac / m);
      log_weights.push_back(std::log(theta) - log_g);
      bets.push_back(-frac / (1.0 - m));
      log_weights.push_back(std::log(1.0 - theta) - log_g);
    }
  }

  std::vector<double> log_caps(bets.size(), 0.0);
  for (double x : xs) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("observation outside [0,1]");
    for (std::size_t g = 0; g < bets.size(); ++g) {
      log_caps[g] += std::log1p(std::max(bets[g] * (x - m), -1.0));
    }
  }
  double total = -kInf;
  for (std::size_t g = 0; g < bets.size(); ++g) {
    total = logsumexp2(total, log_weights[g] + log_caps[g]);
  }
  return std::exp(total);
}

double dkelly_capital(std::span<const double> xs, double m,
                      std::span<const StrategyKind> strategies, double cap) {
  if (strategies.empty()) throw std::invalid_argument("empty strategy list");
  double total = 0.0;
  for (StrategyKind kind : strategies) {
    const auto log_caps = strategy_log_capital(xs, m, kind, cap);
    total += log_caps.empty() ? 1.0 : std::exp(log_caps.back());
  }
  return total / static_cast<double>(strategies.size());
}

ConfSeqRecord hgkelly_cs(std::span<const double> xs, Confidence alpha, int grid_bets,
                         double theta, int grid_size) {
  if (grid_bets < 1) throw std::invalid_argument("need at least one grid bet");
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta in [0,1]");
  if (xs.empty()) throw std::invalid_argument("empty input sequence");

  GridCsBuilder builder(alpha, grid_size, "hgkelly");
  const auto& grid = builder.grid();
  const double log_threshold = -std::log(alpha.alpha());
  const double log_g = std::log(static_cast<double>(grid_bets));
  const double log_theta = std::log(theta) - log_g;
  const double log_one_minus_theta = std::log(1.0 - theta) - log_g;

  const std::size_t n_m = grid.size();
  const std::size_t blocks = static_cast<std::size_t>(grid_bets);
  // Component wealth per (candidate mean, signed grid bet).
  std::vector<double> log_plus(n_m * blocks, 0.0), log_minus(n_m * blocks, 0.0);

  for (double x : xs) {
    builder.note_observation(x);
    for (std::size_t i = builder.interior_begin(); i < builder.interior_end(); ++i) {
      const double m = grid[i];
      double stat = -kInf;
      for (std::size_t g = 0; g < blocks; ++g) {
        const double frac = static_cast<double>(g + 1) / static_cast<double>(grid_bets);
        double& lp = log_plus[i * blocks + g];
        double& lm = log_minus[i * blocks + g];
        lp += std::log1p(std::max((frac / m) * (x - m), -1.0));
        lm += std::log1p(std::max((-frac / (1.0 - m)) * (x - m), -1.0));
        stat = logsumexp2(stat, log_theta + lp);
        stat = logsumexp2(stat, log_one_minus_theta + lm);
      }
      builder.set_member(i, stat < log_threshold);
    }
    builder.commit_step(/*widen=*/true);
  }
  return builder.take();
}

ConfSeqRecord conbo_cs(std::span<const double> xs, Confidence alpha,
                       const BettingConfig& cfg) {
  validate_config(cfg);
  if (xs.empty()) throw std::invalid_argument("empty input sequence");

  GridCsBuilder builder(alpha, cfg.grid_size, "conbo");
  const auto& grid = builder.grid();
  const double log_threshold = -std::log(alpha.alpha());
  const double log_theta = std::log(cfg.theta);
  const double log_one_minus_theta = std::log(1.0 - cfg.theta);

  std::vector<double> log_plus(grid.size(), 0.0), log_minus(grid.size(), 0.0);
  ConboInner inner{cfg.inner, cfg.cap, cfg.constant_bet, RunningMoments{}, {}, {}, {}};

  double lower = 0.0, upper = 1.0;
  for (double x : xs) {
    const double lam_plus_raw = std::max(inner.bet_at(lower, true), 0.0);
    const double lam_minus_raw = std::max(-inner.bet_at(upper, false), 0.0);
    builder.note_observation(x);
    for (std::size_t i = builder.interior_begin(); i < builder.interior_end(); ++i) {
      const double m = grid[i];
      const double lam_plus = std::min(lam_plus_raw, cfg.cap / m);
      const double lam_minus = std::min(lam_minus_raw, cfg.cap / (1.0 - m));
      log_plus[i] += std::log1p(std::max(lam_plus * (x - m), -1.0));
      log_minus[i] += std::log1p(std::max(-lam_minus * (x - m), -1.0));
      const double stat = hedged_stat(log_theta, log_one_minus_theta, log_plus[i],
                                      log_minus[i], /*use_sum=*/false);
      builder.set_member(i, stat < log_threshold);
    }
    builder.commit_step(/*widen=*/true);
    inner.observe(x, lower, upper);
    const Interval& raw = builder.last_raw();
    if (!raw.empty()) {
      lower = raw.lo;
      upper = raw.hi;
    }
  }
  return builder.take();
}

std::vector<double> e_value(std::span<const double> xs,
                            std::span<const double> candidate_means,
                            StrategyKind method, double cap, double constant_bet) {
  if (candidate_means.empty()) throw std::invalid_argument("empty null set");
  std::vector<LogCapital> capitals(candidate_means.size());
  std::vector<OnsState> ons;
  if (method == StrategyKind::ons) ons.resize(candidate_means.size());
  RunningMoments moments;
  std::vector<double> history;
  if (method == StrategyKind::kelly) history.reserve(xs.size());

  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    double min_log = kInf;
    for (std::size_t i = 0; i < capitals.size(); ++i) {
      const double m = candidate_means[i];
      double lambda = 0.0;
      switch (method) {
        case StrategyKind::kelly: lambda = kelly_bet(history, m, cap); break;
        case StrategyKind::akelly: lambda = akelly_bet(moments, m, cap); break;
        case StrategyKind::lbow: lambda = lbow_bet(moments, m, cap); break;
        case StrategyKind::ons: lambda = ons[i].bet(m, cap); break;
        case StrategyKind::constant: lambda = clamp_bet(constant_bet, m, cap); break;
      }
      capitals[i].multiply_by(std::max(1.0 + lambda * (x - m), 0.0));
      if (method == StrategyKind::ons) ons[i].observe(x, m, cap);
      min_log = std::min(min_log, capitals[i].log_value());
    }
    moments.update(x);
    if (method == StrategyKind::kelly) history.push_back(x);
    out.push_back(std::exp(min_log));
  }
  return out;
}

PvalueSeries p_value(std::span<const double> xs, std::span<const double> candidate_means,
                     StrategyKind method, double cap, double constant_bet) {
  const auto evalues = e_value(xs, candidate_means, method, cap, constant_bet);
  PvalueSeries series;
  series.p.reserve(evalues.size());
  series.running_min.reserve(evalues.size());
  double best = 1.0;
  for (double e : evalues) {
    const double p = e > 1.0 ? 1.0 / e : 1.0;
    best = std::min(best, p);
    series.p.push_back(p);
    series.running_min.push_back(best);
  }
  return series;
}

ConfSeqRecord quantile_cs(std::span<const double> xs, double p, Confidence alpha,
                          std::span<const double> q_grid, const LambdaSchedule& sched) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile level must lie in (0,1)");
  if (q_grid.empty()) throw std::invalid_argument("empty quantile grid");
  if (xs.empty()) throw std::invalid_argument("empty input sequence");

  ConfSeqRecord record;
  record.method = "quantile";
  record.alpha = alpha.alpha();
  const double log_threshold = -std::log(alpha.alpha());
  const double lam_lo = -1.0 / (1.0 - p), lam_hi = 1.0 / p;

  const std::vector<double> grid(q_grid.begin(), q_grid.end());
  std::vector<LogCapital> capitals(grid.size());
  std::vector<RunningMoments> indicator_moments(grid.size());
  std::vector<bool> member(grid.size(), false);
  Interval running{grid.front(), grid.back()};

  for (double x : xs) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double indicator = x <= grid[i] ? 1.0 : 0.0;
      const double lambda =
          std::clamp(sched.next(indicator_moments[i], alpha), lam_lo, lam_hi);
      capitals[i].multiply_by(std::max(1.0 + lambda * (indicator - p), 0.0));
      indicator_moments[i].update(indicator);
      member[i] = capitals[i].log_value() < log_threshold;
    }
    const Interval raw = grid_hull(member, grid, /*widen_by_spacing=*/false);
    running = running.intersect(raw);
    record.raw.push_back(raw);
    record.intersected.push_back(running);
  }
  return record;
}

double dominance_gamma(double m, double lambda) {
  return std::exp(-m * lambda - lambda * lambda / 8.0) * std::expm1(lambda);
}

bool reject_at_endpoint(double x_seen_max, double x_seen_min, double m) {
  if (m == 0.0) return x_seen_max > 0.0;
  if (m == 1.0) return x_seen_min < 1.0;
  throw std::invalid_argument("endpoint rule applies only at m = 0 or 1");
}

}  // namespace betcs
