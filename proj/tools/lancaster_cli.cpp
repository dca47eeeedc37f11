#include <CLI11.hpp>
#include <fmt/core.h>

#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lancaster/lancaster.hpp"

namespace {

using namespace lancaster;

constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string experiment = "power_weak_pairwise";
  std::vector<double> grid;
  std::optional<std::size_t> n;
  std::optional<std::size_t> reps;
  std::optional<std::size_t> bootstraps;
  double ln = 20.0;
  double alpha = 0.05;
  std::string correction = "simple";
  std::string method = "wild";
  double sigma_x = 1.0, sigma_y = 1.0, sigma_z = 1.0;
  bool median_heuristic = false;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
  bool desk = false;
  std::vector<std::string> shifts;
  std::string input;
  std::vector<std::string> columns;
  std::string rows;
  std::size_t workers = 1;
  std::string plot;
  std::size_t burn_in = 0;
  bool timing = false;
  std::string generator = "weak_pairwise";
};

ExperimentKind parse_experiment(const std::string& s) {
  for (auto k : {ExperimentKind::power_weak_pairwise, ExperimentKind::power_strong_pairwise, ExperimentKind::fpr_study,
                 ExperimentKind::single_test})
    if (s == to_string(k)) return k;
  throw InputError("unknown experiment '" + s + "'");
}

ArKind parse_generator(const std::string& s) {
  if (s == "weak_pairwise") return ArKind::weak_pairwise;
  if (s == "strong_pairwise") return ArKind::strong_pairwise;
  if (s == "independent") return ArKind::independent;
  throw InputError("unknown generator '" + s + "'");
}

std::size_t parse_count(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size() || s.front() == '-') throw InputError("invalid " + what + " '" + s + "'");
  return static_cast<std::size_t>(v);
}

io::IngestOptions ingest_options(const Options& o) {
  io::IngestOptions opt;
  if (!o.rows.empty()) {
    const auto colon = o.rows.find(':');
    if (colon == std::string::npos) throw InputError("--rows expects start:count, got '" + o.rows + "'");
    opt.first = parse_count(o.rows.substr(0, colon), "row start");
    opt.count = parse_count(o.rows.substr(colon + 1), "row count");
  }
  for (const auto& s : o.shifts) {
    const auto colon = s.rfind(':');
    if (colon == std::string::npos || colon == 0) throw InputError("--shift expects column:offset, got '" + s + "'");
    opt.shifts[s.substr(0, colon)] = parse_count(s.substr(colon + 1), "shift offset");
  }
  return opt;
}

TestConfig test_config(const Options& o, std::size_t default_bootstraps) {
  TestConfig cfg;
  cfg.kernels = {KernelSpec(o.sigma_x), KernelSpec(o.sigma_y), KernelSpec(o.sigma_z)};
  cfg.median_heuristic = o.median_heuristic;
  cfg.bootstraps = o.bootstraps.value_or(default_bootstraps);
  cfg.ln = o.ln;
  cfg.alpha = o.alpha;
  cfg.correction = o.correction == "simple" ? Correction::simple : Correction::holm_bonferroni;
  cfg.method = o.method == "wild" ? BootstrapMethod::wild : BootstrapMethod::permutation;
  cfg.seed = o.seed;
  cfg.validate();
  return cfg;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::fwrite(content.data(), 1, content.size(), stdout);
  else
    io::detail::write_file(path, content);
}

int run_single(const Options& o) {
  const std::size_t n = o.n.value_or(o.desk ? 600 : 1200);
  const TestConfig cfg = test_config(o, o.desk ? 200 : 250);
  std::optional<TripleSeries> data;
  if (!o.input.empty()) {
    if (o.columns.size() != 3) throw InputError("--columns needs exactly three column names");
    data = io::ingest_returns_csv(o.input, {o.columns[0], o.columns[1], o.columns[2]}, ingest_options(o));
  } else {
    const double coeff = o.grid.empty() ? 0.0 : o.grid.front();
    data = generate({parse_generator(o.generator), n, coeff, o.burn_in}, Stream(o.seed).child(0));
  }
  const auto report = run_single_test(*data, cfg);
  write_output(o.out, to_json(report).dump(2) + "\n");
  return 0;
}

int run(const Options& o) {
  const ExperimentKind kind = parse_experiment(o.experiment);
  if (kind == ExperimentKind::single_test) return run_single(o);

  ExperimentSpec spec = o.desk ? ExperimentSpec::desk(kind) : ExperimentSpec::paper(kind);
  if (!o.grid.empty()) spec.grid = o.grid;
  if (o.n) spec.n = *o.n;
  if (o.reps) spec.replications = *o.reps;
  spec.test = test_config(o, spec.test.bootstraps);
  spec.burn_in = o.burn_in;
  spec.workers = o.workers == 0 ? default_workers() : o.workers;
  spec.record_timing = o.timing;

  const auto rows = run_experiment(spec);
  const auto format = o.format == "json" ? io::ResultFormat::json : io::ResultFormat::csv;
  write_output(o.out, format == io::ResultFormat::json ? io::results_to_json(rows).dump(2) + "\n" : io::results_to_csv(rows));
  if (!o.plot.empty()) io::emit_plot(rows, o.plot);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Three-variable interaction tests for time series: power and false-positive experiments, "
               "and single-data-set tests on CSV returns."};
  app.add_option("--experiment", o.experiment, "power_weak_pairwise | power_strong_pairwise | fpr_study | single_test")
      ->capture_default_str();
  app.add_option("--grid", o.grid, "Coefficient grid, comma separated (d for power curves, a for fpr_study)")
      ->delimiter(',');
  app.add_option("--n", o.n, "Series length (default 1200; fpr_study 1000; --desk 600)");
  app.add_option("--reps", o.reps, "Data sets per grid value (default 300; fpr_study 200; --desk 100)");
  app.add_option("--bootstraps", o.bootstraps, "Bootstrap draws per sub-test (default 250; --desk 200)");
  app.add_option("--ln", o.ln, "Wild bootstrap dependence length")->capture_default_str();
  app.add_option("--alpha", o.alpha, "Test level")->capture_default_str();
  app.add_option("--correction", o.correction, "Composite rule used by single_test")
      ->check(CLI::IsMember({"simple", "hb"}))
      ->capture_default_str();
  app.add_option("--method", o.method, "Bootstrap calibration for power curves and single_test")
      ->check(CLI::IsMember({"wild", "perm"}))
      ->capture_default_str();
  auto* sx = app.add_option("--sigma-x", o.sigma_x, "Gaussian bandwidth for X")->capture_default_str();
  auto* sy = app.add_option("--sigma-y", o.sigma_y, "Gaussian bandwidth for Y")->capture_default_str();
  auto* sz = app.add_option("--sigma-z", o.sigma_z, "Gaussian bandwidth for Z")->capture_default_str();
  app.add_flag("--median-heuristic", o.median_heuristic, "Per data set median-distance bandwidths")
      ->excludes(sx)
      ->excludes(sy)
      ->excludes(sz);
  app.add_option("--seed", o.seed, "Root seed")->capture_default_str();
  app.add_option("--out", o.out, "Output path (default stdout)");
  app.add_option("--format", o.format, "Result format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_flag("--desk", o.desk, "Reduced scale: n=600, 100 data sets, 200 bootstraps");
  app.add_option("--input", o.input, "single_test: CSV of price levels with a header row");
  app.add_option("--columns", o.columns, "single_test: three column names, comma separated")->delimiter(',');
  app.add_option("--rows", o.rows, "single_test: start:count over the differenced rows");
  app.add_option("--shift", o.shifts, "single_test: column:offset, repeatable; shifts one series forward");
  app.add_option("--generator", o.generator, "single_test without --input: simulated triple")
      ->check(CLI::IsMember({"weak_pairwise", "strong_pairwise", "independent"}))
      ->capture_default_str();
  app.add_option("--workers", o.workers, "Worker threads (0 = all cores); results do not depend on it")
      ->capture_default_str();
  app.add_option("--plot", o.plot, "Also write an SVG line chart of the rejection rates");
  app.add_option("--burn-in", o.burn_in, "Generator steps discarded before recording")->capture_default_str();
  app.add_flag("--timing", o.timing, "Record wall seconds per grid value (output is then not reproducible)");
  app.footer(
      "CSV returns are first differences divided by their sample standard deviation (n-1 denominator).\n"
      "Exit codes: 0 success, 2 input error, 3 runtime or numerical error.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    return run(o);
  } catch (const InputError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRuntime;
  }
}
