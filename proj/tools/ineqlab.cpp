// Command-line front end: verify a scenario file, run a parameter sweep, or
// run the built-in Gaussian equality oracle.
//
// Exit codes: 0 all verdicts pass, 1 at least one inequality verdict failed,
// 2 malformed input or evaluation error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ineqlab/scenario.hpp"

namespace {

using ineqlab::json;

json builtin_oracle_scenario() {
  const json gauss1 = {{"type", "gaussian"}, {"mean", {0.5}}, {"cov", {{1.0}}}};
  const json gauss2 = {{"type", "gaussian"}, {"mean", {0.5, -0.25}}, {"cov", {{1.0, 0.0}, {0.0, 1.0}}}};
  const json std1 = {{"type", "gaussian"}, {"dim", 1}};
  const json std2 = {{"type", "gaussian"}, {"dim", 2}};
  const json wide1 = {{"type", "gaussian"}, {"mean", {0.0}}, {"cov", {{2.0}}}};

  json items = json::array();
  for (const std::string id : {"lsi.gaussian_bl", "lsi.gamma2_s", "lsi.lp_homogeneous",
                               "lsi.transport_defLSI", "lsi.combined", "talagrand.dimensional",
                               "hwi.dimensional"}) {
    items.push_back({{"kind", "inequality"}, {"id", id}, {"nu", gauss1}, {"mu", std1}});
    items.push_back({{"kind", "inequality"}, {"id", id}, {"nu", gauss2}, {"mu", std2}});
  }
  // Gaussian scalings saturate the combined deficit bound
  items.push_back({{"kind", "inequality"}, {"id", "lsi.combined"}, {"nu", wide1}, {"mu", std1}});
  items.push_back({{"kind", "bl"},
                   {"id", "bl.gaussian_spectral"},
                   {"mu", std2},
                   {"f", {{"kind", "linear"}, {"a", {0.75, -0.5}}}}});
  items.push_back({{"kind", "bl"},
                   {"id", "bl.gaussian_dim"},
                   {"mu", std2},
                   {"f", {{"kind", "norm_squared"}}}});
  items.push_back({{"kind", "trace"},
                   {"source", std1},
                   {"target", {{"type", "gaussian"}, {"mean", {0.0}}, {"cov", {{4.0}}}}}});
  items.push_back({{"kind", "geodesic"},
                   {"m0", std1},
                   {"m1", {{"type", "gaussian"}, {"mean", {0.0}}, {"cov", {{4.0}}}}}});
  return json{{"name", "gaussian_equalities"}, {"items", items}};
}

int emit_reports(std::vector<ineqlab::ReportRow> rows, const ineqlab::RunOptions& opt) {
  std::filesystem::create_directories(opt.out_dir);
  ineqlab::write_text_file(opt.out_dir + "/report.csv", ineqlab::report_csv(rows));
  ineqlab::write_text_file(opt.out_dir + "/report.json", ineqlab::report_json(rows).dump(2) + "\n");
  std::size_t passed = 0;
  for (const auto& row : rows) {
    if (row.ev.verdict) {
      ++passed;
    } else {
      std::cout << "FAIL " << row.ev.id << " (item " << row.item << ", subrow " << row.subrow
                << "): slack " << ineqlab::format_double(row.ev.slack) << " < -tolerance "
                << ineqlab::format_double(row.ev.tolerance) << "\n";
    }
  }
  std::cout << passed << "/" << rows.size() << " checks passed; reports in " << opt.out_dir
            << "\n";
  return passed == rows.size() ? 0 : 1;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  ineqlab::require(in.good(), "cannot open: " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for dimensional functional inequalities"};
  app.require_subcommand(1);

  ineqlab::RunOptions opt;
  app.add_option("--out", opt.out_dir, "output directory for reports")->capture_default_str();
  app.add_option("--tol-scale", opt.tol_scale, "multiply every tolerance by this factor")
      ->capture_default_str();
  app.add_option("--seed", opt.seed, "seed for stochastic solvers")->capture_default_str();
  app.add_option("--jobs", opt.jobs, "worker threads for scenario items")->capture_default_str();

  std::string scenario_path, sweep_path;
  auto* verify = app.add_subcommand("verify", "evaluate every item of a scenario file");
  verify->add_option("scenario", scenario_path, "scenario JSON file")->required();
  verify->fallthrough();
  auto* sweep = app.add_subcommand("sweep", "write a long-format CSV over a parameter family");
  sweep->add_option("sweepfile", sweep_path, "sweep JSON file")->required();
  sweep->fallthrough();
  auto* oracle = app.add_subcommand("oracle", "run the built-in Gaussian equality suite");
  oracle->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    // Items may write artifacts (e.g. trajectory CSVs) while the scenario
    // runs, so the output directory must exist before dispatch.
    std::filesystem::create_directories(opt.out_dir);
    if (verify->parsed()) {
      const auto scenario = ineqlab::scenario_from_json(load_json_file(scenario_path));
      return emit_reports(ineqlab::run_scenario(scenario, opt), opt);
    }
    if (sweep->parsed()) {
      const json j = load_json_file(sweep_path);
      const std::string csv = ineqlab::sweep_csv(j, j.value("max_rows", std::size_t{100000}));
      std::filesystem::create_directories(opt.out_dir);
      ineqlab::write_text_file(opt.out_dir + "/sweep.csv", csv);
      std::cout << "sweep written to " << opt.out_dir << "/sweep.csv\n";
      return 0;
    }
    if (oracle->parsed()) {
      const auto scenario = ineqlab::scenario_from_json(builtin_oracle_scenario());
      return emit_reports(ineqlab::run_scenario(scenario, opt), opt);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
