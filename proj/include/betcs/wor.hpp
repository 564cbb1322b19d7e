#ifndef BETCS_WOR_HPP
#define BETCS_WOR_HPP

#include <cstdint>
#include <span>

#include "betcs/betting.hpp"
#include "betcs/core.hpp"
#include "betcs/supermg.hpp"

namespace betcs {

/// Progress through a without-replacement sample of a finite population.
class WorState {
 public:
  explicit WorState(std::int64_t population_size);

  void observe(double x);  // x in [0,1]; at most N observations

  std::int64_t population_size() const { return population_size_; }
  std::int64_t seen() const { return seen_; }
  double running_sum() const { return running_sum_; }

 private:
  std::int64_t population_size_;
  std::int64_t seen_ = 0;
  double running_sum_ = 0.0;
};

/// Conditional mean of the next draw under the null "population mean = m":
/// (N m - sum of seen values) / (N - t). Falls outside [0,1] exactly when the
/// null is already impossible given what was seen.
double wor_cond_mean(const WorState& state, double m);

/// Wealth against one candidate population mean. A conditional mean outside
/// [0,1] refutes the null deterministically and the tracker locks into a
/// rejected state; a conditional mean of exactly 0 or 1 pins every remaining
/// value, so a contradicting observation also rejects.
class WorCapitalTracker {
 public:
  bool rejected() const { return rejected_; }
  double log_value() const { return capital_.log_value(); }
  void step(const WorState& before, double x, double lambda, double m);

 private:
  LogCapital capital_;
  bool rejected_ = false;
};

void wor_capital_step(WorCapitalTracker& tracker, const WorState& before, double x,
                      double lambda, double m);

/// Without-replacement hedged capital confidence sequence; the magnitude of
/// the m-free predictable sequence is capped at cap/m_t and cap/(1-m_t) using
/// the conditional candidate mean at each step. At t = N only candidate means
/// within a grid spacing of the realized population mean survive.
ConfSeqRecord hedged_wor_cs(std::span<const double> xs, std::int64_t population_size,
                            Confidence alpha, const BettingConfig& cfg,
                            const LambdaSchedule& dot_schedule = LambdaSchedule::pm_plus_minus());

/// Fixed-sample variant: running intersection at t = n with the fixed-horizon
/// schedule sqrt(2 log(2/alpha) / (n var_{t-1})).
Interval hedged_wor_ci(std::span<const double> xs, std::int64_t population_size,
                       std::int64_t n, Confidence alpha, const BettingConfig& cfg);

/// Confidence-boundary betting with every appearance of the candidate mean
/// replaced by its conditional counterpart.
ConfSeqRecord conbo_wor_cs(std::span<const double> xs, std::int64_t population_size,
                           Confidence alpha, const BettingConfig& cfg);

}  // namespace betcs

#endif  // BETCS_WOR_HPP
