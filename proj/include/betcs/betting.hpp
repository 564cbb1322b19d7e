#ifndef BETCS_BETTING_HPP
#define BETCS_BETTING_HPP

#include <cmath>
#include <span>
#include <vector>

#include "betcs/core.hpp"
#include "betcs/supermg.hpp"

namespace betcs {

enum class StrategyKind { kelly, akelly, lbow, ons, constant };

struct BettingConfig {
  double theta = 0.5;               // wealth split between the two directions
  double cap = kDefaultCap;         // truncation level c
  int grid_size = kDefaultGridSize; // candidate means per unit interval
  bool use_sum = false;             // sum-form membership statistic for hedged_cs
  StrategyKind inner = StrategyKind::lbow;  // ConBo inner game strategy
  double constant_bet = 0.0;        // bet for StrategyKind::constant
};

/// Wealth held in log space; a zero factor absorbs at -inf permanently.
class LogCapital {
 public:
  void multiply_by(double factor);
  double log_value() const { return log_value_; }
  double value() const { return std::exp(log_value_); }

 private:
  double log_value_ = 0.0;
};

/// One wealth update: capital *= 1 + lambda * (x - m). The bet must satisfy
/// lambda in [-1/(1-m), 1/m] so the factor stays nonnegative.
void capital_step(LogCapital& capital, double x, double lambda, double m);

/// Largest admissible positive / most negative admissible bet at m, scaled by
/// the truncation level. m at the relevant endpoint yields +-infinity.
double bet_cap_upper(double m, double cap);
double bet_cap_lower(double m, double cap);

/// Root of the hindsight score sum (x_i - m) / (1 + lambda (x_i - m)) over the
/// given history, clipped to [-cap/(1-m), cap/m]. Empty history bets zero.
double kelly_bet(std::span<const double> history, double m, double cap);

/// (mean - m) / (var + (mean - m)^2), clipped.
double akelly_bet(const RunningMoments& moments, double m, double cap);

/// (mean - m) / (w |mean - m| + var + (mean - m)^2) with w = m when the
/// numerator is nonnegative and 1 - m otherwise, clipped.
double lbow_bet(const RunningMoments& moments, double m, double cap);

/// Online-Newton-step bettor for a fixed candidate mean. The first wager is
/// the clipped initial value 1; afterwards the bet follows the damped ascent
/// step lambda + (2 / (2 - log 3)) * z / A with z = y / (1 + y*lambda),
/// A = 1 + sum z^2, clipped after every step.
class OnsState {
 public:
  double bet(double m, double cap) const;
  void observe(double x, double m, double cap);

 private:
  double lambda_ = 1.0;
  double sum_sq_grad_ = 0.0;
};

/// Per-time log wealth of a single strategy played against candidate mean m.
/// Bets are clipped to [-cap/(1-m), cap/m]; result[k] is log K_{k+1}(m).
std::vector<double> strategy_log_capital(std::span<const double> xs, double m,
                                         StrategyKind kind, double cap,
                                         double constant_bet = 0.0);

/// Confidence sequence from per-candidate capital processes of one strategy.
/// Sublevel sets need not be intervals, so the reported set is the convex
/// hull of surviving grid points widened by one grid spacing.
ConfSeqRecord betting_strategy_cs(std::span<const double> xs, Confidence alpha,
                                  StrategyKind kind, const BettingConfig& cfg);

/// Hedged capital confidence sequence. Capital is split theta / 1-theta
/// between bets for mu >= m and mu < m; both directions use the magnitude of
/// the same m-free predictable sequence, capped at cap/m and cap/(1-m). The
/// max-form statistic is quasiconvex in m, so the sublevel set is an interval
/// and the widened grid hull is a guaranteed superset. With use_sum the
/// tighter sum statistic is thresholded instead (no interval guarantee).
ConfSeqRecord hedged_cs(std::span<const double> xs, Confidence alpha,
                        const BettingConfig& cfg,
                        const LambdaSchedule& dot_schedule = LambdaSchedule::pm_plus_minus());

/// Fixed-sample hedged interval: running intersection of hedged_cs at t = n
/// under the fixed-horizon schedule sqrt(2 log(2/alpha) / (n var_{t-1})).
Interval hedged_ci(std::span<const double> xs, Confidence alpha,
                   const BettingConfig& cfg);

/// Average capital over a grid of constant bets. Plain form spreads
/// grid_bets constant bets evenly across [-1/(1-m), 1/m]; the hedged form
/// uses the positive multiples g/G of 1/m and of 1/(1-m) weighted theta and
/// 1-theta per side.
double gkelly_capital(std::span<const double> xs, double m, int grid_bets,
                      bool hedged, double theta = 0.5);

/// Average capital over a finite set of strategies run side by side at m.
double dkelly_capital(std::span<const double> xs, double m,
                      std::span<const StrategyKind> strategies, double cap);

/// Confidence sequence from the hedged grid-Kelly capital, which is convex in
/// m, so sublevel sets are intervals.
ConfSeqRecord hgkelly_cs(std::span<const double> xs, Confidence alpha,
                         int grid_bets, double theta, int grid_size);

/// Confidence-boundary betting: one positive and one negative bet per round,
/// aimed by the inner strategy at the previous interval endpoints, then
/// capped per candidate mean exactly as in hedged_cs (interval guarantee
/// carries over).
ConfSeqRecord conbo_cs(std::span<const double> xs, Confidence alpha,
                       const BettingConfig& cfg);

struct PvalueSeries {
  std::vector<double> p;            // sup over the null set of 1/K_t, capped at 1
  std::vector<double> running_min;
};

/// Anytime-valid p-value for H0: mu in S, with S given as candidate means.
PvalueSeries p_value(std::span<const double> xs, std::span<const double> candidate_means,
                     StrategyKind method, double cap = kDefaultCap,
                     double constant_bet = 0.0);

/// Safe e-value inf_{m in S} K_t(m), one entry per time.
std::vector<double> e_value(std::span<const double> xs,
                            std::span<const double> candidate_means,
                            StrategyKind method, double cap = kDefaultCap,
                            double constant_bet = 0.0);

/// Confidence sequence for the p-quantile over a grid of candidate values q.
/// Wealth per q multiplies 1 + lambda_t (1{x <= q} - p) with the schedule
/// emission clamped into [-1/(1-p), 1/p]; observations may be any reals.
/// Intervals are hulls of surviving grid points in q units (not clipped).
ConfSeqRecord quantile_cs(std::span<const double> xs, double p, Confidence alpha,
                          std::span<const double> q_grid, const LambdaSchedule& sched);

/// Slope gamma = exp(-m*lambda - lambda^2/8) * (exp(lambda) - 1) of the chord
/// dominating the Hoeffding factor; used by the dominance property test.
double dominance_gamma(double m, double lambda);

/// Degenerate candidate means: a [0,1]-valued variable with mean 0 (or 1) is
/// almost surely constant, so any contradicting observation refutes m.
bool reject_at_endpoint(double x_seen_max, double x_seen_min, double m);

}  // namespace betcs

#endif  // BETCS_BETTING_HPP
