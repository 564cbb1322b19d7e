#ifndef BETCS_BASELINES_HPP
#define BETCS_BASELINES_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "betcs/core.hpp"
#include "betcs/supermg.hpp"

namespace betcs {

/// Classical fixed-sample interval: mean +/- sqrt(log(2/alpha) / (2n)).
Interval hoeffding_ci(std::span<const double> xs, Confidence alpha);

/// Empirical Bernstein interval of Maurer-Pontil:
/// mean +/- sqrt(2 var log(4/alpha) / n) + 7 log(4/alpha) / (3(n-1)),
/// with the unbiased sample variance. Needs n >= 2.
Interval mp09_ci(std::span<const double> xs, Confidence alpha);

/// Anderson's interval from the DKW band over the whole empirical CDF, with
/// order-statistic conventions X_(0) = 0 and X_(n+1) = 1. Always contained in
/// the Hoeffding interval.
Interval anderson_ci(std::span<const double> xs, Confidence alpha);

/// Bentkus' interval under the worst-case variance bound 1/4: mean +/- W*/n
/// where W* solves inf_{0 <= y <= W} E[(sum G_i - y)_+^2] / (W - y)^2 = alpha
/// over the exact law of the two-point sum (G_i = -1/4 w.p. 4/5, 1 w.p. 1/5).
Interval bentkus_ci(std::span<const double> xs, Confidence alpha);

/// Finite mixture over positive bets for the sub-Bernoulli product process.
struct MixtureRule {
  std::vector<double> lambdas;
  std::vector<double> weights;  // positive, normalized to sum to one

  /// Default prior: exponential density truncated to (0, lambda_max],
  /// discretized by Gauss-Legendre quadrature.
  static MixtureRule truncated_exponential(double lambda_max = 5.0, int nodes = 64);
};

/// Sub-Bernoulli mixture confidence sequence. The candidate mean m survives
/// while both directional mixture processes
///   integral prod_i exp{lambda (x_i - m) - log(1 - m + m e^lambda)} dF(lambda)
/// stay below 2/alpha (each direction run at level alpha/2).
ConfSeqRecord bernoulli_mixture_cs(std::span<const double> xs, Confidence alpha,
                                   const MixtureRule& mixture,
                                   int grid_size = kDefaultGridSize);

enum class WorBaselineKind { hoeffding, empirical_bernstein };

/// Without-replacement supermartingale confidence sequences around the
/// weighted WoR mean estimator, with margins
///   (sum psi + log(2/alpha)) / sum lambda_i (1 + (i-1)/(N-i+1)).
/// The Hoeffding variant uses psi_H with the usual schedule; the empirical
/// Bernstein variant uses v_i psi_E with plain running means inside v_i.
ConfSeqRecord wor_baseline_cs(std::span<const double> xs, std::int64_t population_size,
                              Confidence alpha, WorBaselineKind kind);

/// Fixed-sample analogues of the above at t = n.
Interval wor_baseline_ci(std::span<const double> xs, std::int64_t population_size,
                         std::int64_t n, Confidence alpha, WorBaselineKind kind);

namespace detail {

/// Exact law of sum of n two-point variables (-1/4 w.p. 4/5, 1 w.p. 1/5):
/// n+1 atoms (value, probability).
std::vector<std::pair<double, double>> bentkus_sum_atoms(int n);

/// E[(S - y)_+^2] over the atoms.
double bentkus_tail_expectation(const std::vector<std::pair<double, double>>& atoms,
                                double y);

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

}  // namespace detail

}  // namespace betcs

#endif  // BETCS_BASELINES_HPP
