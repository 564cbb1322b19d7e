#ifndef BETCS_SIMHARNESS_HPP
#define BETCS_SIMHARNESS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "betcs/betting.hpp"
#include "betcs/core.hpp"
#include "betcs/supermg.hpp"

namespace betcs {

/// Distribution/population description for reproducible simulation; the
/// stream of replicate r is a pure function of (seed, r).
struct ScenarioSpec {
  enum class Family { bernoulli, beta, discrete, non_iid_switch, wor_population };

  Family family = Family::bernoulli;
  double p = 0.5;                       // bernoulli
  double beta_a = 1.0, beta_b = 1.0;    // beta
  std::vector<double> atoms;            // discrete mixture support
  std::vector<double> atom_weights;     // matching weights (need not be normalized)
  std::int64_t switch_at = 250;         // non_iid_switch: Beta(10,10) before, Bernoulli(1/2) after
  std::vector<double> population;       // wor_population, values in [0,1]
  std::int64_t horizon = 1000;          // t_max (or n for fixed-sample use)
  std::uint64_t seed = 1;
  int replicates = 100;

  double true_mean() const;
  bool without_replacement() const { return family == Family::wor_population; }
};

std::vector<double> make_stream(const ScenarioSpec& spec, int replicate_index);

/// Knobs shared by the method registry.
struct MethodOptions {
  BettingConfig betting;
  std::int64_t population_size = 0;  // required by the *-wor methods
  int permutations = 50;             // permuted-eb
  std::uint64_t permutation_seed = 7;
  int gkelly_bets = 20;              // hgkelly component bets per side
};

/// Confidence-sequence methods runnable by name:
///   pm-h, pm-eb, hedged, conbo, hgkelly, akelly, lbow, ons, kelly,
///   bernoulli-mixture, trivial, hedged-wor, conbo-wor, h-wor, eb-wor.
ConfSeqRecord run_cs_method(const std::string& name, std::span<const double> xs,
                            Confidence alpha, const MethodOptions& opts);

/// Fixed-sample methods runnable by name:
///   hoeffding, mp09, anderson, bentkus, va-eb, permuted-eb, hedged-ci,
///   h-wor-ci, eb-wor-ci, hedged-wor-ci.
Interval run_ci_method(const std::string& name, std::span<const double> xs,
                       Confidence alpha, const MethodOptions& opts);

bool is_cs_method(const std::string& name);
bool is_ci_method(const std::string& name);
bool is_wor_method(const std::string& name);

struct CoverageRow {
  std::string method;
  int replicates = 0;
  double miscoverage = 0.0;  // frequency of: exists t <= horizon with mu outside C_t
  double std_error = 0.0;    // binomial standard error
};

std::vector<CoverageRow> coverage_experiment(const ScenarioSpec& spec,
                                             std::span<const std::string> methods,
                                             Confidence alpha,
                                             const MethodOptions& opts = {});

struct WidthRow {
  std::string method;
  std::int64_t t = 0;
  double mean_width = 0.0;  // running-intersection width for CS methods
};

/// Mean widths at the listed checkpoints, averaged over spec.replicates.
/// CI methods are recomputed on the first t observations per checkpoint.
std::vector<WidthRow> width_experiment(const ScenarioSpec& spec,
                                       std::span<const std::string> methods,
                                       Confidence alpha,
                                       std::span<const std::int64_t> checkpoints,
                                       const MethodOptions& opts = {});

struct TimingRow {
  std::string method;
  double seconds = 0.0;
};

/// Wall time to build each CS from 1 to t_max on a shared Bernoulli(1/2)
/// stream with the given candidate grid.
std::vector<TimingRow> bench_timings(std::span<const std::string> methods,
                                     std::int64_t t_max, int grid_size,
                                     std::uint64_t seed = 1);

/// Worker count: BETCS_THREADS when set, hardware concurrency otherwise.
int thread_count();

/// Runs fn(0..n-1) across thread_count() workers; results must be written to
/// disjoint slots so merging stays order-independent.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

/// %g-style formatting with the given number of significant digits.
std::string format_sig(double value, int significant_digits = 6);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace betcs

#endif  // BETCS_SIMHARNESS_HPP
