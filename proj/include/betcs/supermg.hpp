#ifndef BETCS_SUPERMG_HPP
#define BETCS_SUPERMG_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "betcs/core.hpp"

namespace betcs {

/// Per-time confidence sets. raw[k] and intersected[k] are the sets after
/// k+1 observations; intersected is the running intersection of raw, so it is
/// nested and may go empty.
struct ConfSeqRecord {
  std::vector<Interval> raw;
  std::vector<Interval> intersected;
  std::string method;
  double alpha = 0.0;
};

/// Closed-form predictably-mixed Hoeffding confidence sequence:
/// weighted mean +/- (log(2/alpha) + sum psi_H(lambda_i)) / sum lambda_i,
/// clipped to [0,1]. Schedule emissions must be positive.
ConfSeqRecord pm_hoeffding_cs(std::span<const double> xs, Confidence alpha,
                              const LambdaSchedule& sched);

/// Closed-form predictably-mixed empirical Bernstein confidence sequence:
/// the margin replaces psi_H with v_i * psi_E(lambda_i) where
/// v_i = 4 (x_i - mean_{i-1})^2. Schedule emissions must lie in (0,1).
ConfSeqRecord pm_eb_cs(std::span<const double> xs, Confidence alpha,
                       const LambdaSchedule& sched);

/// Variance-adaptive empirical Bernstein confidence interval: the running
/// intersection of pm_eb_cs at t = n under the fixed-sample schedule
/// sqrt(2 log(2/alpha) / (n var_{t-1})) ^ cap.
Interval va_eb_ci(std::span<const double> xs, Confidence alpha,
                  double cap = kDefaultCap);

/// Permutation-averaged empirical Bernstein interval. The data are permuted
/// `permutations` times (the first permutation is the identity, the rest are
/// uniform with replacement, seeded); the directional Bernstein processes are
/// recomputed per permutation and averaged, and the interval is the hull of
/// grid points where both averaged processes stay below 2/alpha at time n.
/// No running intersection is taken; the average is only an e-value at the
/// final time.
Interval permuted_eb_ci(std::span<const double> xs, Confidence alpha,
                        int permutations, std::uint64_t seed,
                        int grid_size = kDefaultGridSize);

}  // namespace betcs

#endif  // BETCS_SUPERMG_HPP
