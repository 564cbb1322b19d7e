#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct RunOutcome {
  int exit_code = -1;
  std::string stderr_text;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("betcs_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunOutcome run_cli(const std::string& args) {
  const fs::path err_file = work_dir() / "stderr.txt";
  const std::string cmd =
      std::string(BETCS_CLI_PATH) + " " + args + " 2>" + err_file.string();
  const int status = std::system(cmd.c_str());
  RunOutcome outcome;
  if (WIFEXITED(status)) outcome.exit_code = WEXITSTATUS(status);
  std::ifstream err(err_file);
  std::stringstream buffer;
  buffer << err.rdbuf();
  outcome.stderr_text = buffer.str();
  return outcome;
}

std::string write_data(const std::string& name, const std::vector<double>& values) {
  const fs::path path = work_dir() / name;
  std::ofstream out(path);
  for (double v : values) out << v << '\n';
  return path.string();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("cs subcommand emits the documented schema") {
  std::vector<double> values(80, 0.5);
  const auto input = write_data("flat.txt", values);
  const auto output = (work_dir() / "cs.csv").string();
  const auto outcome = run_cli("cs --method hedged --alpha 0.05 --grid 200 --input " +
                               input + " --output " + output);
  REQUIRE(outcome.exit_code == 0);

  const auto lines = read_lines(output);
  REQUIRE(lines.size() == 81);
  CHECK(lines[0] == "t,lower,upper");
  CHECK(lines[1].rfind("1,", 0) == 0);
  CHECK(lines[80].rfind("80,", 0) == 0);

  // identical invocations produce identical bytes
  const auto output2 = (work_dir() / "cs2.csv").string();
  run_cli("cs --method hedged --alpha 0.05 --grid 200 --input " + input +
          " --output " + output2);
  CHECK(file_bytes(output) == file_bytes(output2));
}

TEST_CASE("ci subcommand brackets the mean") {
  std::vector<double> values(100, 0.5);
  const auto input = write_data("halves.txt", values);
  const auto output = (work_dir() / "ci.csv").string();
  const auto outcome =
      run_cli("ci --method va-eb --alpha 0.05 --input " + input + " --output " + output);
  REQUIRE(outcome.exit_code == 0);
  const auto lines = read_lines(output);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "n,lower,upper");
  double n = 0, lo = 0, hi = 0;
  REQUIRE(std::sscanf(lines[1].c_str(), "%lf,%lf,%lf", &n, &lo, &hi) == 3);
  CHECK(n == 100);
  CHECK(lo <= 0.5);
  CHECK(hi >= 0.5);
}

TEST_CASE("permuted ci is seed-reproducible") {
  std::vector<double> values;
  for (int i = 0; i < 60; ++i) values.push_back((i % 3) / 2.0);
  const auto input = write_data("mix.txt", values);
  const auto out_a = (work_dir() / "perm_a.csv").string();
  const auto out_b = (work_dir() / "perm_b.csv").string();
  REQUIRE(run_cli("ci --method permuted-eb --permutations 16 --seed 42 --grid 300 --input " +
                  input + " --output " + out_a)
              .exit_code == 0);
  REQUIRE(run_cli("ci --method permuted-eb --permutations 16 --seed 42 --grid 300 --input " +
                  input + " --output " + out_b)
              .exit_code == 0);
  CHECK(file_bytes(out_a) == file_bytes(out_b));
}

TEST_CASE("wor-cs rejects oversized samples") {
  std::vector<double> values(60, 0.5);
  const auto input = write_data("toomany.txt", values);
  const auto output = (work_dir() / "worcs.csv").string();
  const auto outcome =
      run_cli("wor-cs --method hedged-wor --N 50 --input " + input + " --output " + output);
  CHECK(outcome.exit_code == 3);
  CHECK(outcome.stderr_text.find("population") != std::string::npos);
}

TEST_CASE("wor-cs runs at the census") {
  // alternating values: a well-mixed order, as the sampling model assumes
  std::vector<double> values(40, 0.0);
  for (int i = 0; i < 40; i += 2) values[static_cast<std::size_t>(i)] = 1.0;
  const auto input = write_data("census.txt", values);
  const auto output = (work_dir() / "census.csv").string();
  const auto outcome = run_cli("wor-cs --method hedged-wor --N 40 --grid 200 --input " +
                               input + " --output " + output);
  REQUIRE(outcome.exit_code == 0);
  const auto lines = read_lines(output);
  REQUIRE(lines.size() == 41);
  double t = 0, lo = 0, hi = 0;
  REQUIRE(std::sscanf(lines[40].c_str(), "%lf,%lf,%lf", &t, &lo, &hi) == 3);
  CHECK(lo <= 0.5);
  CHECK(hi >= 0.5);
  CHECK(hi - lo < 0.05);
}

TEST_CASE("csv column selection with a header") {
  const fs::path path = work_dir() / "table.csv";
  {
    std::ofstream out(path);
    out << "id,score,weight\n";
    out << "1,0.25,9\n";
    out << "2,0.75,9\n";
    out << "3,0.5,9\n";
  }
  const auto output = (work_dir() / "from_csv.csv").string();
  const auto outcome = run_cli("ci --method hoeffding --csv-col 2 --skip-header --input " +
                               path.string() + " --output " + output);
  REQUIRE(outcome.exit_code == 0);
  const auto lines = read_lines(output);
  REQUIRE(lines.size() == 2);
  CHECK(lines[1].rfind("3,", 0) == 0);  // n = 3 rows read

  const auto missing = run_cli("ci --method hoeffding --csv-col 7 --skip-header --input " +
                               path.string() + " --output " + output);
  CHECK(missing.exit_code == 3);
}

TEST_CASE("unknown method is a usage error") {
  std::vector<double> values(10, 0.5);
  const auto input = write_data("small.txt", values);
  const auto output = (work_dir() / "unused.csv").string();
  const auto outcome =
      run_cli("cs --method banana --input " + input + " --output " + output);
  CHECK(outcome.exit_code == 2);
  CHECK(outcome.stderr_text.find("banana") != std::string::npos);
}

TEST_CASE("out-of-range data is reported with its line number") {
  const auto input = write_data("bad.txt", {0.5, 0.25, 1.75, 0.5});
  const auto output = (work_dir() / "unused2.csv").string();
  const auto outcome =
      run_cli("cs --method pm-h --input " + input + " --output " + output);
  CHECK(outcome.exit_code == 3);
  CHECK(outcome.stderr_text.find("line 3") != std::string::npos);
}

TEST_CASE("pvalue subcommand") {
  std::vector<double> values(120, 1.0);
  const auto input = write_data("ones.txt", values);
  const auto output = (work_dir() / "pv.csv").string();
  const auto outcome = run_cli("pvalue --method lbow --null-lo 0.5 --null-hi 0.5 --input " +
                               input + " --output " + output);
  REQUIRE(outcome.exit_code == 0);
  const auto lines = read_lines(output);
  REQUIRE(lines.size() == 121);
  CHECK(lines[0] == "t,p,p_running_min");
  double t = 0, p = 0, pmin = 0;
  REQUIRE(std::sscanf(lines[120].c_str(), "%lf,%lf,%lf", &t, &p, &pmin) == 3);
  CHECK(pmin < 1e-6);  // constant ones crush the null mean 1/2
}

TEST_CASE("quantile subcommand") {
  // symmetric grid of reals visited in a mixed order (stride coprime to 200)
  std::vector<double> values;
  for (int i = 0; i < 200; ++i) {
    values.push_back(-3.0 + 6.0 * ((i * 37) % 200) / 199.0);
  }
  const auto input = write_data("reals.txt", values);
  const auto output = (work_dir() / "quant.csv").string();
  const auto outcome = run_cli("quantile-cs --p 0.5 --grid 100 --input " + input +
                               " --output " + output);
  REQUIRE(outcome.exit_code == 0);
  const auto lines = read_lines(output);
  REQUIRE(lines.size() == 201);
  double t = 0, lo = 0, hi = 0;
  REQUIRE(std::sscanf(lines[200].c_str(), "%lf,%lf,%lf", &t, &lo, &hi) == 3);
  CHECK(lo <= 0.0);
  CHECK(hi >= 0.0);  // median of the symmetric grid is 0
  CHECK(hi - lo < 4.5);  // strictly inside the full candidate range of 6
}

TEST_CASE("simulate writes csv and a json echo") {
  const auto output = (work_dir() / "cov.csv").string();
  const auto outcome = run_cli(
      "simulate --experiment coverage --family bernoulli --p 0.5 --t-max 50 "
      "--replicates 10 --methods trivial --seed 9 --output " +
      output);
  REQUIRE(outcome.exit_code == 0);
  const auto lines = read_lines(output);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "method,replicates,miscoverage,std_error");
  CHECK(lines[1] == "trivial,10,0,0");

  const auto json_lines = read_lines(output + ".json");
  CHECK(!json_lines.empty());
  bool has_seed = false;
  for (const auto& line : json_lines) {
    if (line.find("\"seed\": 9") != std::string::npos) has_seed = true;
  }
  CHECK(has_seed);
}

TEST_CASE("bench writes timings") {
  const auto output = (work_dir() / "bench.csv").string();
  const auto outcome =
      run_cli("bench --methods pm-h,pm-eb --t-max 200 --grid 100 --output " + output);
  REQUIRE(outcome.exit_code == 0);
  const auto lines = read_lines(output);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "method,seconds");
  CHECK(lines[1].rfind("pm-h,", 0) == 0);
  CHECK(lines[2].rfind("pm-eb,", 0) == 0);
}

TEST_CASE("missing subcommand is a usage error") {
  const auto outcome = run_cli("");
  CHECK(outcome.exit_code == 2);
}
