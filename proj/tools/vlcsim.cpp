#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vlcsim/calibration.hpp"
#include "vlcsim/errors.hpp"
#include "vlcsim/params.hpp"
#include "vlcsim/reproduce.hpp"
#include "vlcsim/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> oversampling;
  fs::path out_dir = "results";
  std::optional<fs::path> params;
};

// One JSON object on stderr so scripts can parse failures.
int fail(const std::string& kind, const std::string& message,
         const std::vector<std::string>& keys = {}, int code = 1) {
  json line = {{"error", kind}, {"message", message}};
  if (!keys.empty()) line["keys"] = keys;
  std::cerr << line.dump() << '\n';
  return code;
}

void log_line(const std::string& msg) { std::cerr << msg << '\n'; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_run(const GlobalFlags& g, const std::string& scenario_arg) {
  auto scenario = vlcsim::load_scenario_or_preset(scenario_arg);
  if (g.seed) scenario.seed = *g.seed;
  if (g.oversampling) scenario.samples_per_bit = *g.oversampling;
  const auto params = vlcsim::load_resolved_params(g.params);

  const auto t0 = std::chrono::steady_clock::now();
  const auto metrics = vlcsim::run_scenario(scenario, params);
  const auto dir = vlcsim::write_results(g.out_dir, scenario, params, metrics);

  json summary = {{"scenario", scenario.name},
                  {"ber", metrics.ber},
                  {"bit_errors", metrics.bit_errors},
                  {"payload_bits", metrics.payload_bits},
                  {"throughput_bps", metrics.throughput_bps},
                  {"switch_events", metrics.switch_events.size()},
                  {"elapsed_s", seconds_since(t0)},
                  {"out_dir", dir.string()}};
  if (std::isfinite(metrics.energy_per_bit_j)) summary["energy_per_bit_j"] = metrics.energy_per_bit_j;
  std::cout << summary.dump() << '\n';
  return 0;
}

int cmd_calibrate(const GlobalFlags& g, int max_evaluations, bool quiet) {
  const auto path = vlcsim::resolve_params_path(g.params);
  const auto start = path && fs::exists(*path) ? vlcsim::load_params(*path) : vlcsim::default_params();
  const auto targets = vlcsim::default_targets();

  vlcsim::CalibrationOptions options;
  options.max_evaluations = max_evaluations;
  if (!quiet) options.log = log_line;

  const auto t0 = std::chrono::steady_clock::now();
  vlcsim::CalibrationReport report;
  try {
    report = vlcsim::calibrate(start, targets, options);
  } catch (const vlcsim::CalibrationError& e) {
    return fail("calibration", e.what(), e.targets());
  }

  fs::create_directories(g.out_dir);
  const fs::path target_file = path ? *path : g.out_dir / "receivers.json";
  vlcsim::save_params(target_file, report.params);
  std::ofstream csv(g.out_dir / "calibration.csv");
  vlcsim::write_calibration_csv(csv, report.outcomes);

  json summary = {{"params", target_file.string()},
                  {"changed", report.changed},
                  {"evaluations", report.evaluations},
                  {"targets", report.outcomes.size()},
                  {"elapsed_s", seconds_since(t0)},
                  {"report", (g.out_dir / "calibration.csv").string()}};
  std::cout << summary.dump() << '\n';
  return 0;
}

int cmd_reproduce(const GlobalFlags& g, const std::vector<std::string>& ids, bool quiet) {
  vlcsim::ExperimentOptions opt;
  opt.params = vlcsim::load_resolved_params(g.params);
  if (g.seed) opt.seed = *g.seed;
  if (g.oversampling) opt.samples_per_bit = *g.oversampling;
  if (!quiet) opt.log = log_line;

  std::vector<std::string> run_ids = ids;
  if (run_ids.size() == 1 && run_ids.front() == "all") run_ids = vlcsim::figure_ids();
  for (const auto& id : run_ids) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto files = vlcsim::reproduce(id, g.out_dir, opt);
    json summary = {{"figure", id}, {"elapsed_s", seconds_since(t0)}, {"files", json::array()}};
    for (const auto& f : files) summary["files"].push_back(f.string());
    std::cout << summary.dump() << '\n';
  }
  return 0;
}

int cmd_list_presets() {
  for (const auto& p : vlcsim::list_presets()) {
    std::cout << p.name;
    if (!p.description.empty()) std::cout << '\t' << p.description;
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visible-light link simulator with three switchable receivers"};
  app.require_subcommand(1);

  GlobalFlags g;
  std::uint64_t seed = 0;
  int oversampling = 0;
  std::string out_dir, params;
  auto* seed_opt = app.add_option("--seed", seed, "Override the random seed");
  auto* os_opt = app.add_option("--oversampling", oversampling, "Samples per bit")
                     ->check(CLI::Range(2, 1024));
  app.add_option("--out-dir", out_dir, "Results directory (default: results)");
  app.add_option("--params", params,
                 std::string("Model parameter file (else $") + vlcsim::kParamsEnvVar +
                     ", else built-in defaults)");

  std::string scenario_arg;
  auto* run = app.add_subcommand("run", "Simulate one scenario file or preset");
  run->add_option("scenario", scenario_arg, "Scenario file or preset name")->required();

  int max_evaluations = 2000;
  bool quiet = false;
  auto* cal = app.add_subcommand("calibrate", "Fit the receiver models to the target set");
  cal->add_option("--max-evaluations", max_evaluations, "Protocol runs the search may spend");
  app.add_flag("-q,--quiet", quiet, "No progress messages on stderr");

  std::vector<std::string> figure_ids;
  auto* rep = app.add_subcommand("reproduce", "Write the CSV data behind a figure or table");
  rep->add_option("figure-id", figure_ids, "Figure ids, or 'all'")->required();

  auto* list = app.add_subcommand("list-presets", "Show the preset scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), {}, 2);
  }

  if (*seed_opt) g.seed = seed;
  if (*os_opt) g.oversampling = oversampling;
  if (!out_dir.empty()) g.out_dir = out_dir;
  if (!params.empty()) g.params = fs::path(params);

  try {
    if (*run) return cmd_run(g, scenario_arg);
    if (*cal) return cmd_calibrate(g, max_evaluations, quiet);
    if (*rep) return cmd_reproduce(g, figure_ids, quiet);
    if (*list) return cmd_list_presets();
  } catch (const vlcsim::ValidationError& e) {
    return fail("validation", e.what(), e.keys());
  } catch (const std::invalid_argument& e) {
    return fail("invalid_argument", e.what());
  } catch (const fs::filesystem_error& e) {
    return fail("io", e.what(), {e.path1().string()});
  } catch (const std::exception& e) {
    return fail("runtime", e.what());
  }
  return 0;
}
