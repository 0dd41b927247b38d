#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "commands.hpp"

namespace {

using namespace sepbell;

int fail(const std::string& kind, const std::string& message, double magnitude, int code, bool as_json) {
  if (as_json) {
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    j["magnitude"] = magnitude;
    j["exit_code"] = code;
    std::cerr << j.dump() << "\n";
  } else {
    std::cerr << "error: " << message << "\n";
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separability criteria and Bell-type bounds for two-qubit states"};
  app.require_subcommand(1);
  app.fallthrough();

  cli::RunConfig cfg;
  std::string config_path, format = "csv";
  double verdict_tol = -1.0;
  bool error_json = false;
  app.add_option("--seed", cfg.seed, "Random seed recorded in every report");
  app.add_option("--tol", verdict_tol, "Verdict tolerance")->check(CLI::PositiveNumber);
  app.add_option("--config", config_path, "INI file with [tolerances] and [optimize]")->check(CLI::ExistingFile);
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", cfg.out, "Output path (default stdout)");
  app.add_flag("--error-json", error_json, "Report errors as JSON on stderr");

  std::string state = "maximally_mixed", frames = "pauli";
  std::vector<std::string> criteria{"all"};
  auto* eval = app.add_subcommand("eval", "Evaluate criteria on one state");
  eval->add_option("--state", state, "State file or shorthand (werner:0.5, singlet, ...)");
  eval->add_option("--criteria", criteria, "Criteria names")->delimiter(',');
  eval->add_option("--frames", frames, "Frame pair name or JSON file");

  std::string family = "werner";
  double pmin = 0.0, pmax = 1.0, step = 0.01;
  std::vector<std::string> scan_criteria{"ppt", "mixsep2", "chsh_max", "gap"};
  auto* scan = app.add_subcommand("scan", "Scan a one-parameter state family");
  scan->add_option("--family", family, "werner or noisy_singlet");
  scan->add_option("--pmin", pmin, "Smallest weight");
  scan->add_option("--pmax", pmax, "Largest weight");
  scan->add_option("--step", step, "Grid step");
  scan->add_option("--criteria", scan_criteria, "Criteria names")->delimiter(',');
  scan->add_option("--frames", frames, "Frame pair name or JSON file");

  long samples = 500;
  double band = 1e-4;
  auto* equivalence = app.add_subcommand("equivalence", "Compare the frame-search verdict with the PPT oracle");
  equivalence->add_option("--samples", samples, "Number of random mixed states");
  equivalence->add_option("--band", band, "Half-width of the excluded boundary band");

  std::string kind = "separable";
  long region_samples = 10000;
  auto* region = app.add_subcommand("region", "Sample the (<X>, <Y>) plane");
  region->add_option("--samples", region_samples, "Number of points");
  region->add_option("--kind", kind, "separable or all_states");

  std::string pure_state;
  long pure_samples = 1000;
  bool all_four = false;
  auto* puretest = app.add_subcommand("puretest", "Finite pure-state separability test");
  puretest->add_option("--state", pure_state, "Pure-state JSON file or name; omit for a seeded batch");
  puretest->add_option("--samples", pure_samples, "Batch size");
  puretest->add_flag("--all-four", all_four, "Include the orientation-trivial inequalities");

  std::string objective = "mixsep2_slack";
  auto* optimize = app.add_subcommand("optimize", "Maximize an objective over local settings");
  optimize->add_option("--state", state, "State file or shorthand");
  optimize->add_option("--objective", objective, "chsh, quad, mixsep2_slack or loo_linear");
  optimize->add_option("--restarts", cfg.optimize.restarts, "Restarts");
  optimize->add_option("--max-evaluations", cfg.optimize.max_evaluations, "Evaluations per restart");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("Usage", e.what(), 0.0, 2, error_json);
  }

  try {
    // Explicit command-line values win over the config file.
    const auto restarts = cfg.optimize.restarts, evals = cfg.optimize.max_evaluations;
    if (!config_path.empty()) cli::apply_config_file(config_path, cfg);
    if (optimize->count("--restarts")) cfg.optimize.restarts = restarts;
    if (optimize->count("--max-evaluations")) cfg.optimize.max_evaluations = evals;
    if (verdict_tol > 0.0) cfg.tol.verdict = verdict_tol;
    cfg.format = format == "json" ? cli::Format::json : cli::Format::csv;

    cli::Report report;
    if (*eval)
      report = cli::cmd_eval(cfg, state, criteria, frames);
    else if (*scan)
      report = cli::cmd_scan(cfg, family, pmin, pmax, step, scan_criteria, frames);
    else if (*equivalence)
      report = cli::cmd_equivalence(cfg, samples, band);
    else if (*region)
      report = cli::cmd_region(cfg, region_samples, kind);
    else if (*puretest)
      report = cli::cmd_puretest(cfg, pure_state, pure_samples, all_four);
    else
      report = cli::cmd_optimize(cfg, state, objective);

    const std::string text = cli::render(report, cfg.format);
    if (cfg.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(cfg.out, std::ios::binary);
      if (!out) throw Error(ErrorKind::Schema, "cannot write '" + cfg.out + "'");
      out << text;
    }
  } catch (const Error& e) {
    return fail(std::string(to_string(e.kind())), e.what(), e.magnitude(), e.is_validation() ? 2 : 3, error_json);
  } catch (const std::exception& e) {
    return fail("Internal", e.what(), 0.0, 3, error_json);
  }
  return 0;
}
