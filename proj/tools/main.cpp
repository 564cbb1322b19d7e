// Command-line front end: anytime-valid confidence sequences and fixed-sample
// confidence intervals for bounded means, with and without replacement, plus
// p-values, quantile sequences, simulation experiments, and timing benches.
//
// Exit codes: 0 success, 2 usage, 3 data validation, 4 internal numeric failure.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "betcs/baselines.hpp"
#include "betcs/betting.hpp"
#include "betcs/core.hpp"
#include "betcs/simharness.hpp"
#include "betcs/supermg.hpp"
#include "betcs/wor.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& joined) {
  std::vector<std::string> parts;
  std::stringstream stream(joined);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<double> read_values(const std::string& path, int csv_col, bool skip_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path);
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_header && line_no == 1) continue;
    if (line.empty()) continue;
    std::string field = line;
    if (csv_col >= 1) {
      std::stringstream row(line);
      std::string cell;
      int col = 0;
      field.clear();
      while (std::getline(row, cell, ',')) {
        ++col;
        if (col == csv_col) {
          field = cell;
          break;
        }
      }
      if (col < csv_col) {
        throw DataError("line " + std::to_string(line_no) + ": missing column " +
                        std::to_string(csv_col));
      }
    }
    try {
      std::size_t consumed = 0;
      const double value = std::stod(field, &consumed);
      while (consumed < field.size() &&
             (field[consumed] == ' ' || field[consumed] == '\t' || field[consumed] == '\r')) {
        ++consumed;
      }
      if (consumed != field.size()) throw std::invalid_argument("trailing characters");
      values.push_back(value);
    } catch (const std::exception&) {
      throw DataError("line " + std::to_string(line_no) + ": not a number: " + field);
    }
  }
  if (values.empty()) throw DataError("no data in input file: " + path);
  return values;
}

void require_unit_range(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0 && values[i] <= 1.0)) {
      throw DataError("line " + std::to_string(i + 1) + ": value out of range [0,1]: " +
                      betcs::format_sig(values[i]));
    }
  }
}

void write_cs_csv(const std::string& path, const betcs::ConfSeqRecord& record, bool raw) {
  const auto& seq = raw ? record.raw : record.intersected;
  std::vector<std::vector<std::string>> rows;
  rows.reserve(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) {
    rows.push_back({std::to_string(t + 1), betcs::format_sig(seq[t].lo),
                    betcs::format_sig(seq[t].hi)});
  }
  betcs::write_csv(path, {"t", "lower", "upper"}, rows);
}

void write_ci_csv(const std::string& path, std::size_t n, const betcs::Interval& ci) {
  betcs::write_csv(path, {"n", "lower", "upper"},
                   {{std::to_string(n), betcs::format_sig(ci.lo),
                     betcs::format_sig(ci.hi)}});
}

struct CommonFlags {
  double alpha = 0.05;
  std::string input;
  std::string output;
  int csv_col = 0;
  bool skip_header = false;
  double cap = betcs::kDefaultCap;
  double theta = 0.5;
  int grid = betcs::kDefaultGridSize;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_input) {
  cmd->add_option("--alpha", flags.alpha, "error level in (0,1)")->capture_default_str();
  if (needs_input) {
    cmd->add_option("--input", flags.input, "newline-delimited numeric file")->required();
    cmd->add_option("--csv-col", flags.csv_col,
                    "1-based CSV column to read (0 = plain lines)")
        ->capture_default_str();
    cmd->add_flag("--skip-header", flags.skip_header, "skip the first input line");
  }
  cmd->add_option("--output", flags.output, "output CSV path")->required();
  cmd->add_option("--cap", flags.cap, "bet truncation level c")->capture_default_str();
  cmd->add_option("--theta", flags.theta, "hedge fraction")->capture_default_str();
  cmd->add_option("--grid", flags.grid, "candidate grid size")->capture_default_str();
  cmd->add_option("--seed", flags.seed, "random seed")->capture_default_str();
}

betcs::MethodOptions make_options(const CommonFlags& flags) {
  betcs::MethodOptions opts;
  opts.betting.cap = flags.cap;
  opts.betting.theta = flags.theta;
  opts.betting.grid_size = flags.grid;
  return opts;
}

betcs::ScenarioSpec scenario_from_flags(const std::string& family, double p, double beta_a,
                                        double beta_b, const std::string& atoms,
                                        std::int64_t switch_at,
                                        const std::string& population_file,
                                        std::int64_t t_max, std::uint64_t seed,
                                        int replicates) {
  betcs::ScenarioSpec spec;
  spec.horizon = t_max;
  spec.seed = seed;
  spec.replicates = replicates;
  if (family == "bernoulli") {
    spec.family = betcs::ScenarioSpec::Family::bernoulli;
    spec.p = p;
  } else if (family == "beta") {
    spec.family = betcs::ScenarioSpec::Family::beta;
    spec.beta_a = beta_a;
    spec.beta_b = beta_b;
  } else if (family == "discrete") {
    spec.family = betcs::ScenarioSpec::Family::discrete;
    for (const std::string& pair : split_list(atoms)) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) throw UsageError("atoms must look like v:w,v:w");
      spec.atoms.push_back(std::stod(pair.substr(0, colon)));
      spec.atom_weights.push_back(std::stod(pair.substr(colon + 1)));
    }
  } else if (family == "non-iid") {
    spec.family = betcs::ScenarioSpec::Family::non_iid_switch;
    spec.switch_at = switch_at;
  } else if (family == "wor") {
    spec.family = betcs::ScenarioSpec::Family::wor_population;
    if (population_file.empty()) throw UsageError("wor family needs --population");
    spec.population = read_values(population_file, 0, false);
    require_unit_range(spec.population);
    if (t_max > static_cast<std::int64_t>(spec.population.size())) {
      spec.horizon = static_cast<std::int64_t>(spec.population.size());
    }
  } else {
    throw UsageError("unknown family: " + family);
  }
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"betting-based confidence sequences and intervals for bounded means"};
  app.require_subcommand(1);

  // ---- cs / wor-cs ----
  CommonFlags cs_flags;
  std::string cs_method = "hedged";
  bool cs_raw = false;
  bool cs_use_sum = false;
  auto* cs_cmd = app.add_subcommand("cs", "confidence sequence on a data file");
  add_common(cs_cmd, cs_flags, true);
  cs_cmd->add_option("--method", cs_method, "pm-h, pm-eb, hedged, conbo, hgkelly, akelly, lbow, ons, kelly, bernoulli-mixture")
      ->capture_default_str();
  cs_cmd->add_flag("--raw", cs_raw, "emit per-time sets instead of the running intersection");
  cs_cmd->add_flag("--use-sum", cs_use_sum, "hedged only: sum-form membership statistic");

  CommonFlags worcs_flags;
  std::string worcs_method = "hedged-wor";
  bool worcs_raw = false;
  std::int64_t worcs_population = 0;
  auto* worcs_cmd = app.add_subcommand("wor-cs", "without-replacement confidence sequence");
  add_common(worcs_cmd, worcs_flags, true);
  worcs_cmd->add_option("--method", worcs_method, "hedged-wor, conbo-wor, h-wor, eb-wor")
      ->capture_default_str();
  worcs_cmd->add_option("--N", worcs_population, "population size")->required();
  worcs_cmd->add_flag("--raw", worcs_raw, "emit per-time sets");

  // ---- ci / wor-ci ----
  CommonFlags ci_flags;
  std::string ci_method = "hedged-ci";
  int ci_permutations = 50;
  auto* ci_cmd = app.add_subcommand("ci", "fixed-sample confidence interval");
  add_common(ci_cmd, ci_flags, true);
  ci_cmd->add_option("--method", ci_method,
                     "hoeffding, mp09, anderson, bentkus, va-eb, permuted-eb, hedged-ci")
      ->capture_default_str();
  ci_cmd->add_option("--permutations", ci_permutations, "permuted-eb resamples")
      ->capture_default_str();

  CommonFlags worci_flags;
  std::string worci_method = "hedged-wor-ci";
  std::int64_t worci_population = 0;
  auto* worci_cmd = app.add_subcommand("wor-ci", "without-replacement confidence interval");
  add_common(worci_cmd, worci_flags, true);
  worci_cmd->add_option("--method", worci_method, "hedged-wor-ci, h-wor-ci, eb-wor-ci")
      ->capture_default_str();
  worci_cmd->add_option("--N", worci_population, "population size")->required();

  // ---- pvalue ----
  CommonFlags pv_flags;
  std::string pv_method = "lbow";
  double pv_null_lo = 0.5, pv_null_hi = 0.5;
  auto* pv_cmd = app.add_subcommand("pvalue", "anytime-valid p-value for H0: mean in [lo,hi]");
  add_common(pv_cmd, pv_flags, true);
  pv_cmd->add_option("--method", pv_method, "kelly, akelly, lbow, ons")->capture_default_str();
  pv_cmd->add_option("--null-lo", pv_null_lo, "null set lower endpoint")->required();
  pv_cmd->add_option("--null-hi", pv_null_hi, "null set upper endpoint")->required();

  // ---- quantile-cs ----
  CommonFlags q_flags;
  double q_level = 0.5;
  double q_min = 0.0, q_max = 0.0;
  bool q_range_set = false;
  auto* q_cmd = app.add_subcommand("quantile-cs", "confidence sequence for a quantile");
  add_common(q_cmd, q_flags, true);
  q_cmd->add_option("--p", q_level, "quantile level in (0,1)")->capture_default_str();
  auto* qmin_opt = q_cmd->add_option("--q-min", q_min, "candidate grid lower end");
  auto* qmax_opt = q_cmd->add_option("--q-max", q_max, "candidate grid upper end");
  (void)q_range_set;

  // ---- simulate ----
  CommonFlags sim_flags;
  std::string sim_experiment = "coverage";
  std::string sim_family = "bernoulli";
  std::string sim_methods = "hedged";
  std::string sim_atoms;
  std::string sim_population_file;
  std::string sim_checkpoints;
  double sim_p = 0.5, sim_a = 10.0, sim_b = 30.0;
  std::int64_t sim_switch_at = 250, sim_tmax = 1000;
  int sim_replicates = 100;
  auto* sim_cmd = app.add_subcommand("simulate", "coverage or width experiment");
  add_common(sim_cmd, sim_flags, false);
  sim_cmd->add_option("--experiment", sim_experiment, "coverage or width")->capture_default_str();
  sim_cmd->add_option("--family", sim_family, "bernoulli, beta, discrete, non-iid, wor")
      ->capture_default_str();
  sim_cmd->add_option("--methods", sim_methods, "comma-separated method list")
      ->capture_default_str();
  sim_cmd->add_option("--p", sim_p, "bernoulli success probability")->capture_default_str();
  sim_cmd->add_option("--a", sim_a, "beta shape a")->capture_default_str();
  sim_cmd->add_option("--b", sim_b, "beta shape b")->capture_default_str();
  sim_cmd->add_option("--atoms", sim_atoms, "discrete family, v:w,v:w");
  sim_cmd->add_option("--switch-at", sim_switch_at, "non-iid switch point")
      ->capture_default_str();
  sim_cmd->add_option("--population", sim_population_file, "wor family population file");
  sim_cmd->add_option("--t-max", sim_tmax, "horizon")->capture_default_str();
  sim_cmd->add_option("--replicates", sim_replicates, "replicate count")
      ->capture_default_str();
  sim_cmd->add_option("--checkpoints", sim_checkpoints, "width experiment checkpoints");

  // ---- bench ----
  CommonFlags bench_flags;
  std::string bench_methods = "hedged,conbo,akelly,lbow,ons,kelly";
  std::int64_t bench_tmax = 1000;
  auto* bench_cmd = app.add_subcommand("bench", "wall-time benchmark per method");
  add_common(bench_cmd, bench_flags, false);
  bench_cmd->add_option("--methods", bench_methods, "comma-separated method list")
      ->capture_default_str();
  bench_cmd->add_option("--t-max", bench_tmax, "horizon")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (cs_cmd->parsed()) {
      if (!betcs::is_cs_method(cs_method) || betcs::is_wor_method(cs_method)) {
        throw UsageError("unknown method: " + cs_method);
      }
      const auto values = read_values(cs_flags.input, cs_flags.csv_col, cs_flags.skip_header);
      require_unit_range(values);
      auto opts = make_options(cs_flags);
      opts.betting.use_sum = cs_use_sum;
      const auto record =
          betcs::run_cs_method(cs_method, values, betcs::Confidence(cs_flags.alpha), opts);
      write_cs_csv(cs_flags.output, record, cs_raw);
    } else if (worcs_cmd->parsed()) {
      if (!betcs::is_cs_method(worcs_method) || !betcs::is_wor_method(worcs_method)) {
        throw UsageError("unknown method: " + worcs_method);
      }
      const auto values =
          read_values(worcs_flags.input, worcs_flags.csv_col, worcs_flags.skip_header);
      require_unit_range(values);
      if (static_cast<std::int64_t>(values.size()) > worcs_population) {
        throw DataError("more observations than population (" +
                        std::to_string(values.size()) + " > " +
                        std::to_string(worcs_population) + ")");
      }
      auto opts = make_options(worcs_flags);
      opts.population_size = worcs_population;
      const auto record = betcs::run_cs_method(worcs_method, values,
                                               betcs::Confidence(worcs_flags.alpha), opts);
      write_cs_csv(worcs_flags.output, record, worcs_raw);
    } else if (ci_cmd->parsed()) {
      if (!betcs::is_ci_method(ci_method) || betcs::is_wor_method(ci_method)) {
        throw UsageError("unknown method: " + ci_method);
      }
      const auto values = read_values(ci_flags.input, ci_flags.csv_col, ci_flags.skip_header);
      require_unit_range(values);
      auto opts = make_options(ci_flags);
      opts.permutations = ci_permutations;
      opts.permutation_seed = ci_flags.seed;
      const auto ci =
          betcs::run_ci_method(ci_method, values, betcs::Confidence(ci_flags.alpha), opts);
      write_ci_csv(ci_flags.output, values.size(), ci);
    } else if (worci_cmd->parsed()) {
      if (!betcs::is_ci_method(worci_method) || !betcs::is_wor_method(worci_method)) {
        throw UsageError("unknown method: " + worci_method);
      }
      const auto values =
          read_values(worci_flags.input, worci_flags.csv_col, worci_flags.skip_header);
      require_unit_range(values);
      if (static_cast<std::int64_t>(values.size()) > worci_population) {
        throw DataError("more observations than population");
      }
      auto opts = make_options(worci_flags);
      opts.population_size = worci_population;
      const auto ci = betcs::run_ci_method(worci_method, values,
                                           betcs::Confidence(worci_flags.alpha), opts);
      write_ci_csv(worci_flags.output, values.size(), ci);
    } else if (pv_cmd->parsed()) {
      betcs::StrategyKind kind;
      if (pv_method == "kelly") kind = betcs::StrategyKind::kelly;
      else if (pv_method == "akelly") kind = betcs::StrategyKind::akelly;
      else if (pv_method == "lbow") kind = betcs::StrategyKind::lbow;
      else if (pv_method == "ons") kind = betcs::StrategyKind::ons;
      else throw UsageError("unknown method: " + pv_method);
      if (!(pv_null_lo <= pv_null_hi) || pv_null_lo < 0.0 || pv_null_hi > 1.0) {
        throw UsageError("null set must satisfy 0 <= lo <= hi <= 1");
      }
      const auto values = read_values(pv_flags.input, pv_flags.csv_col, pv_flags.skip_header);
      require_unit_range(values);
      std::vector<double> candidates;
      if (pv_null_lo == pv_null_hi) {
        candidates.push_back(pv_null_lo);
      } else {
        candidates = betcs::linear_grid(pv_null_lo, pv_null_hi, pv_flags.grid);
      }
      const auto series =
          betcs::p_value(values, candidates, kind, pv_flags.cap);
      std::vector<std::vector<std::string>> rows;
      for (std::size_t t = 0; t < series.p.size(); ++t) {
        rows.push_back({std::to_string(t + 1), betcs::format_sig(series.p[t]),
                        betcs::format_sig(series.running_min[t])});
      }
      betcs::write_csv(pv_flags.output, {"t", "p", "p_running_min"}, rows);
    } else if (q_cmd->parsed()) {
      const auto values = read_values(q_flags.input, q_flags.csv_col, q_flags.skip_header);
      double lo = q_min, hi = q_max;
      if (qmin_opt->count() == 0 || qmax_opt->count() == 0) {
        lo = *std::min_element(values.begin(), values.end());
        hi = *std::max_element(values.begin(), values.end());
      }
      if (!(lo < hi)) throw UsageError("quantile grid needs q-min < q-max");
      const auto q_grid = betcs::linear_grid(lo, hi, q_flags.grid);
      const auto record = betcs::quantile_cs(values, q_level, betcs::Confidence(q_flags.alpha),
                                             q_grid, betcs::LambdaSchedule::pm_h());
      write_cs_csv(q_flags.output, record, false);
    } else if (sim_cmd->parsed()) {
      const auto methods = split_list(sim_methods);
      if (methods.empty()) throw UsageError("empty method list");
      for (const auto& m : methods) {
        if (sim_experiment == "coverage" && !betcs::is_cs_method(m)) {
          throw UsageError("coverage expects confidence-sequence methods, got: " + m);
        }
        if (sim_experiment == "width" && !betcs::is_cs_method(m) && !betcs::is_ci_method(m)) {
          throw UsageError("unknown method: " + m);
        }
      }
      const auto spec = scenario_from_flags(sim_family, sim_p, sim_a, sim_b, sim_atoms,
                                            sim_switch_at, sim_population_file, sim_tmax,
                                            sim_flags.seed, sim_replicates);
      auto opts = make_options(sim_flags);
      nlohmann::json summary;
      summary["command"] = "simulate";
      summary["experiment"] = sim_experiment;
      summary["family"] = sim_family;
      summary["alpha"] = sim_flags.alpha;
      summary["seed"] = sim_flags.seed;
      summary["replicates"] = sim_replicates;
      summary["t_max"] = spec.horizon;
      summary["methods"] = methods;
      summary["grid"] = sim_flags.grid;
      summary["cap"] = sim_flags.cap;
      summary["theta"] = sim_flags.theta;
      summary["output_csv"] = sim_flags.output;

      if (sim_experiment == "coverage") {
        const auto rows =
            betcs::coverage_experiment(spec, methods, betcs::Confidence(sim_flags.alpha), opts);
        std::vector<std::vector<std::string>> cells;
        for (const auto& row : rows) {
          cells.push_back({row.method, std::to_string(row.replicates),
                           betcs::format_sig(row.miscoverage),
                           betcs::format_sig(row.std_error)});
        }
        betcs::write_csv(sim_flags.output, {"method", "replicates", "miscoverage", "std_error"},
                         cells);
      } else if (sim_experiment == "width") {
        std::vector<std::int64_t> checkpoints;
        for (const auto& c : split_list(sim_checkpoints)) checkpoints.push_back(std::stoll(c));
        if (checkpoints.empty()) checkpoints.push_back(spec.horizon);
        summary["checkpoints"] = checkpoints;
        const auto rows = betcs::width_experiment(spec, methods,
                                                  betcs::Confidence(sim_flags.alpha),
                                                  checkpoints, opts);
        std::vector<std::vector<std::string>> cells;
        for (const auto& row : rows) {
          cells.push_back(
              {row.method, std::to_string(row.t), betcs::format_sig(row.mean_width)});
        }
        betcs::write_csv(sim_flags.output, {"method", "t", "mean_width"}, cells);
      } else {
        throw UsageError("unknown experiment: " + sim_experiment);
      }
      std::ofstream json_out(sim_flags.output + ".json");
      json_out << summary.dump(2) << '\n';
    } else if (bench_cmd->parsed()) {
      const auto methods = split_list(bench_methods);
      for (const auto& m : methods) {
        if (!betcs::is_cs_method(m) || betcs::is_wor_method(m)) {
          throw UsageError("bench expects with-replacement CS methods, got: " + m);
        }
      }
      const auto rows =
          betcs::bench_timings(methods, bench_tmax, bench_flags.grid, bench_flags.seed);
      std::vector<std::vector<std::string>> cells;
      for (const auto& row : rows) {
        cells.push_back({row.method, betcs::format_sig(row.seconds)});
      }
      betcs::write_csv(bench_flags.output, {"method", "seconds"}, cells);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
