#include "betcs/simharness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "betcs/baselines.hpp"
#include "betcs/rng.hpp"
#include "betcs/wor.hpp"

namespace betcs {

namespace {

std::vector<double> discrete_cdf(const ScenarioSpec& spec) {
  if (spec.atoms.empty() || spec.atoms.size() != spec.atom_weights.size()) {
    throw std::invalid_argument("discrete family needs matching atoms and weights");
  }
  std::vector<double> cdf(spec.atom_weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < spec.atom_weights.size(); ++i) {
    if (!(spec.atom_weights[i] >= 0.0)) {
      throw std::invalid_argument("atom weights must be nonnegative");
    }
    total += spec.atom_weights[i];
    cdf[i] = total;
  }
  if (!(total > 0.0)) throw std::invalid_argument("atom weights must not all vanish");
  for (double& c : cdf) c /= total;
  return cdf;
}

void validate_scenario(const ScenarioSpec& spec) {
  if (spec.horizon < 1) throw std::invalid_argument("horizon must be positive");
  switch (spec.family) {
    case ScenarioSpec::Family::bernoulli:
      if (!(spec.p >= 0.0 && spec.p <= 1.0)) {
        throw std::invalid_argument("bernoulli p must lie in [0,1]");
      }
      break;
    case ScenarioSpec::Family::beta:
      if (!(spec.beta_a > 0.0 && spec.beta_b > 0.0)) {
        throw std::invalid_argument("beta shapes must be positive");
      }
      break;
    case ScenarioSpec::Family::discrete:
      for (double a : spec.atoms) {
        if (!(a >= 0.0 && a <= 1.0)) {
          throw std::invalid_argument("atoms must lie in [0,1]");
        }
      }
      discrete_cdf(spec);
      break;
    case ScenarioSpec::Family::non_iid_switch:
      if (spec.switch_at < 0) throw std::invalid_argument("switch point must be >= 0");
      break;
    case ScenarioSpec::Family::wor_population:
      if (spec.population.empty()) {
        throw std::invalid_argument("wor family needs a population");
      }
      for (double v : spec.population) {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw std::invalid_argument("population values must lie in [0,1]");
        }
      }
      break;
  }
}

}  // namespace

double ScenarioSpec::true_mean() const {
  switch (family) {
    case Family::bernoulli:
      return p;
    case Family::beta:
      return beta_a / (beta_a + beta_b);
    case Family::discrete: {
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        num += atoms[i] * atom_weights[i];
        den += atom_weights[i];
      }
      return num / den;
    }
    case Family::non_iid_switch:
      return 0.5;
    case Family::wor_population:
      return std::accumulate(population.begin(), population.end(), 0.0) /
             static_cast<double>(population.size());
  }
  throw std::logic_error("unreachable");
}

std::vector<double> make_stream(const ScenarioSpec& spec, int replicate_index) {
  validate_scenario(spec);
  StreamRng rng(spec.seed, static_cast<std::uint64_t>(replicate_index));
  std::vector<double> xs;

  switch (spec.family) {
    case ScenarioSpec::Family::bernoulli: {
      xs.reserve(static_cast<std::size_t>(spec.horizon));
      for (std::int64_t t = 0; t < spec.horizon; ++t) xs.push_back(rng.bernoulli(spec.p));
      return xs;
    }
    case ScenarioSpec::Family::beta: {
      xs.reserve(static_cast<std::size_t>(spec.horizon));
      for (std::int64_t t = 0; t < spec.horizon; ++t) {
        xs.push_back(rng.beta(spec.beta_a, spec.beta_b));
      }
      return xs;
    }
    case ScenarioSpec::Family::discrete: {
      const auto cdf = discrete_cdf(spec);
      xs.reserve(static_cast<std::size_t>(spec.horizon));
      for (std::int64_t t = 0; t < spec.horizon; ++t) {
        const double u = rng.uniform();
        std::size_t k = 0;
        while (k + 1 < cdf.size() && u >= cdf[k]) ++k;
        xs.push_back(spec.atoms[k]);
      }
      return xs;
    }
    case ScenarioSpec::Family::non_iid_switch: {
      xs.reserve(static_cast<std::size_t>(spec.horizon));
      for (std::int64_t t = 0; t < spec.horizon; ++t) {
        xs.push_back(t < spec.switch_at ? rng.beta(10.0, 10.0) : rng.bernoulli(0.5));
      }
      return xs;
    }
    case ScenarioSpec::Family::wor_population: {
      xs = spec.population;
      rng.shuffle(xs);
      const auto keep = std::min<std::size_t>(xs.size(),
                                              static_cast<std::size_t>(spec.horizon));
      xs.resize(keep);
      return xs;
    }
  }
  throw std::logic_error("unreachable");
}

namespace {

ConfSeqRecord trivial_cs(std::span<const double> xs, Confidence alpha) {
  ConfSeqRecord record;
  record.method = "trivial";
  record.alpha = alpha.alpha();
  record.raw.assign(xs.size(), Interval::whole());
  record.intersected.assign(xs.size(), Interval::whole());
  return record;
}

std::int64_t require_population(const MethodOptions& opts) {
  if (opts.population_size < 1) {
    throw std::invalid_argument("WoR method needs a population size");
  }
  return opts.population_size;
}

}  // namespace

bool is_wor_method(const std::string& name) {
  return name == "hedged-wor" || name == "conbo-wor" || name == "h-wor" ||
         name == "eb-wor" || name == "h-wor-ci" || name == "eb-wor-ci" ||
         name == "hedged-wor-ci";
}

bool is_cs_method(const std::string& name) {
  static const char* kNames[] = {"pm-h",   "pm-eb",  "hedged", "conbo",
                                 "hgkelly", "akelly", "lbow",   "ons",
                                 "kelly",  "bernoulli-mixture", "trivial",
                                 "hedged-wor", "conbo-wor", "h-wor", "eb-wor"};
  for (const char* n : kNames) {
    if (name == n) return true;
  }
  return false;
}

bool is_ci_method(const std::string& name) {
  static const char* kNames[] = {"hoeffding", "mp09",      "anderson",
                                 "bentkus",   "va-eb",     "permuted-eb",
                                 "hedged-ci", "h-wor-ci",  "eb-wor-ci",
                                 "hedged-wor-ci"};
  for (const char* n : kNames) {
    if (name == n) return true;
  }
  return false;
}

ConfSeqRecord run_cs_method(const std::string& name, std::span<const double> xs,
                            Confidence alpha, const MethodOptions& opts) {
  const BettingConfig& cfg = opts.betting;
  if (name == "pm-h") return pm_hoeffding_cs(xs, alpha, LambdaSchedule::pm_h());
  if (name == "pm-eb") return pm_eb_cs(xs, alpha, LambdaSchedule::pm_eb(cfg.cap));
  if (name == "hedged") return hedged_cs(xs, alpha, cfg);
  if (name == "conbo") return conbo_cs(xs, alpha, cfg);
  if (name == "hgkelly") {
    return hgkelly_cs(xs, alpha, opts.gkelly_bets, cfg.theta, cfg.grid_size);
  }
  if (name == "akelly") return betting_strategy_cs(xs, alpha, StrategyKind::akelly, cfg);
  if (name == "lbow") return betting_strategy_cs(xs, alpha, StrategyKind::lbow, cfg);
  if (name == "ons") return betting_strategy_cs(xs, alpha, StrategyKind::ons, cfg);
  if (name == "kelly") return betting_strategy_cs(xs, alpha, StrategyKind::kelly, cfg);
  if (name == "bernoulli-mixture") {
    return bernoulli_mixture_cs(xs, alpha, MixtureRule::truncated_exponential(),
                                cfg.grid_size);
  }
  if (name == "trivial") return trivial_cs(xs, alpha);
  if (name == "hedged-wor") return hedged_wor_cs(xs, require_population(opts), alpha, cfg);
  if (name == "conbo-wor") return conbo_wor_cs(xs, require_population(opts), alpha, cfg);
  if (name == "h-wor") {
    return wor_baseline_cs(xs, require_population(opts), alpha, WorBaselineKind::hoeffding);
  }
  if (name == "eb-wor") {
    return wor_baseline_cs(xs, require_population(opts), alpha,
                           WorBaselineKind::empirical_bernstein);
  }
  throw std::invalid_argument("unknown confidence-sequence method: " + name);
}

Interval run_ci_method(const std::string& name, std::span<const double> xs,
                       Confidence alpha, const MethodOptions& opts) {
  const BettingConfig& cfg = opts.betting;
  const auto n = static_cast<std::int64_t>(xs.size());
  if (name == "hoeffding") return hoeffding_ci(xs, alpha);
  if (name == "mp09") return mp09_ci(xs, alpha);
  if (name == "anderson") return anderson_ci(xs, alpha);
  if (name == "bentkus") return bentkus_ci(xs, alpha);
  if (name == "va-eb") return va_eb_ci(xs, alpha, cfg.cap);
  if (name == "permuted-eb") {
    return permuted_eb_ci(xs, alpha, opts.permutations, opts.permutation_seed,
                          cfg.grid_size);
  }
  if (name == "hedged-ci") return hedged_ci(xs, alpha, cfg);
  if (name == "h-wor-ci") {
    return wor_baseline_ci(xs, require_population(opts), n, alpha,
                           WorBaselineKind::hoeffding);
  }
  if (name == "eb-wor-ci") {
    return wor_baseline_ci(xs, require_population(opts), n, alpha,
                           WorBaselineKind::empirical_bernstein);
  }
  if (name == "hedged-wor-ci") {
    return hedged_wor_ci(xs, require_population(opts), n, alpha, cfg);
  }
  throw std::invalid_argument("unknown confidence-interval method: " + name);
}

int thread_count() {
  if (const char* env = std::getenv("BETCS_THREADS")) {
    const int requested = std::atoi(env);
    if (requested >= 1) return requested;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
  const int workers = std::min<std::int64_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::int64_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<CoverageRow> coverage_experiment(const ScenarioSpec& spec,
                                             std::span<const std::string> methods,
                                             Confidence alpha, const MethodOptions& opts) {
  validate_scenario(spec);
  const double truth = spec.true_mean();
  std::vector<CoverageRow> rows;
  for (const std::string& name : methods) {
    MethodOptions method_opts = opts;
    if (is_wor_method(name) && method_opts.population_size < 1) {
      method_opts.population_size = static_cast<std::int64_t>(spec.population.size());
    }
    std::vector<char> missed(static_cast<std::size_t>(spec.replicates), 0);
    parallel_for(spec.replicates, [&](std::int64_t r) {
      const auto xs = make_stream(spec, static_cast<int>(r));
      const auto record = run_cs_method(name, xs, alpha, method_opts);
      for (const Interval& c : record.raw) {
        if (!c.contains(truth)) {
          missed[static_cast<std::size_t>(r)] = 1;
          break;
        }
      }
    });
    CoverageRow row;
    row.method = name;
    row.replicates = spec.replicates;
    double total = 0.0;
    for (char m : missed) total += m;
    row.miscoverage = total / static_cast<double>(spec.replicates);
    row.std_error = std::sqrt(row.miscoverage * (1.0 - row.miscoverage) /
                              static_cast<double>(spec.replicates));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<WidthRow> width_experiment(const ScenarioSpec& spec,
                                       std::span<const std::string> methods,
                                       Confidence alpha,
                                       std::span<const std::int64_t> checkpoints,
                                       const MethodOptions& opts) {
  validate_scenario(spec);
  std::vector<WidthRow> rows;
  for (const std::string& name : methods) {
    MethodOptions method_opts = opts;
    if (is_wor_method(name) && method_opts.population_size < 1) {
      method_opts.population_size = static_cast<std::int64_t>(spec.population.size());
    }
    std::vector<std::vector<double>> widths(
        checkpoints.size(), std::vector<double>(static_cast<std::size_t>(spec.replicates)));
    parallel_for(spec.replicates, [&](std::int64_t r) {
      const auto xs = make_stream(spec, static_cast<int>(r));
      if (is_cs_method(name)) {
        const auto record = run_cs_method(name, xs, alpha, method_opts);
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
          const auto t = static_cast<std::size_t>(checkpoints[c]);
          if (t < 1 || t > record.intersected.size()) {
            throw std::invalid_argument("checkpoint beyond horizon");
          }
          widths[c][static_cast<std::size_t>(r)] = record.intersected[t - 1].width();
        }
      } else {
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
          const auto t = static_cast<std::size_t>(checkpoints[c]);
          if (t < 1 || t > xs.size()) {
            throw std::invalid_argument("checkpoint beyond horizon");
          }
          const Interval ci = run_ci_method(
              name, std::span<const double>(xs.data(), t), alpha, method_opts);
          widths[c][static_cast<std::size_t>(r)] = ci.width();
        }
      }
    });
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      WidthRow row;
      row.method = name;
      row.t = checkpoints[c];
      row.mean_width = std::accumulate(widths[c].begin(), widths[c].end(), 0.0) /
                       static_cast<double>(spec.replicates);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<TimingRow> bench_timings(std::span<const std::string> methods,
                                     std::int64_t t_max, int grid_size,
                                     std::uint64_t seed) {
  ScenarioSpec spec;
  spec.family = ScenarioSpec::Family::bernoulli;
  spec.p = 0.5;
  spec.horizon = t_max;
  spec.seed = seed;
  const auto xs = make_stream(spec, 0);

  MethodOptions opts;
  opts.betting.grid_size = grid_size;
  const Confidence alpha(0.05);

  std::vector<TimingRow> rows;
  for (const std::string& name : methods) {
    const auto start = std::chrono::steady_clock::now();
    const auto record = run_cs_method(name, xs, alpha, opts);
    const auto stop = std::chrono::steady_clock::now();
    TimingRow row;
    row.method = name;
    row.seconds = std::chrono::duration<double>(stop - start).count();
    if (record.raw.size() != xs.size()) {
      throw std::runtime_error("method produced wrong number of steps");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_sig(double value, int significant_digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*g", significant_digits, value);
  return buffer;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace betcs
