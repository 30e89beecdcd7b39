#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmqop/cli_reports.hpp"
#include "cmqop/errors.hpp"

namespace {

constexpr int kConfigExit = 2;

// Long flag name, help text. Every flag doubles as a config-file key.
const std::vector<std::pair<std::string, std::string>> kSettings = {
    {"N", "number of particles"},
    {"lambda", "coupling g/hbar"},
    {"u", "spectral parameter, comma separated"},
    {"xi", "Q-operator parameter"},
    {"xi2", "second parameter (commutator)"},
    {"t", "evaluation points, N coordinates each, comma separated"},
    {"xi-list", "xi values for int-eq, comma separated"},
    {"panels", "Gauss-Legendre panels per axis"},
    {"order", "Gauss-Legendre order per panel (4..16)"},
    {"tol", "acceptance tolerance of the main residual"},
    {"radius-tol", "tail tolerance for the truncation radius"},
    {"radius", "truncation radius (overrides radius-tol)"},
    {"margin", "interior margin for the commutator"},
    {"wall-guard", "distance from the chamber walls below which nodes are dropped"},
    {"step", "finite-difference step"},
    {"draws", "number of random samples"},
    {"threads", "worker threads"},
    {"seed", "RNG seed"},
    {"r3", "also check H_3 (N = 3 only)"},
    {"json", "write the report as JSON"},
    {"csv", "write the sweep as CSV"},
    {"sweep", "sweep axis: xi, lambda, u-gap, grid-refinement"},
    {"values", "sweep values, comma separated"},
    {"dump-table", "write the Harish-Chandra coefficient table as CSV"},
    {"dump-grid", "write the quadrature grid as CSV"},
    {"dump-matrix", "write the Nystrom matrix as CSV"},
};

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw cmqop::ConfigError("json: cannot open '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Q-operator verification experiments for the hyperbolic Calogero-Moser system"};
  app.set_version_flag("--version", std::string(cmqop::kVersion));

  std::string experiment;
  std::string config_path;
  bool quiet = false;
  app.add_option("experiment", experiment,
                 "int-eq, kernel-id, commutator, diff-eq, asymptotics, fourier-gamma, l2-eigen, hr-eigen")
      ->required();
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_flag("-q,--quiet", quiet, "suppress the table on stdout");

  std::vector<std::optional<std::string>> values(kSettings.size());
  for (std::size_t k = 0; k < kSettings.size(); ++k) {
    const auto& [name, help] = kSettings[k];
    if (name == "r3") {
      app.add_flag_callback("--r3", [&values, k] { values[k] = "true"; }, help);
    } else {
      app.add_option("--" + name, values[k], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigExit;
  }

  cmqop::ExperimentConfig cfg;
  try {
    cfg.experiment = cmqop::parse_experiment(experiment);
    if (!config_path.empty()) cfg = cmqop::load_config_file(config_path, cfg);
    // The positional experiment wins over the file.
    cfg.experiment = cmqop::parse_experiment(experiment);
    for (std::size_t k = 0; k < kSettings.size(); ++k) {
      if (values[k]) cmqop::apply_setting(cfg, kSettings[k].first, *values[k]);
    }
    cfg.validate();

    if (!cfg.sweep_axis.empty()) {
      const auto rows = cmqop::sweep(cfg, cfg.sweep_axis, cfg.sweep_values);
      int code = 0;
      nlohmann::json all = nlohmann::json::array();
      for (const auto& r : rows) {
        code = std::max(code, cmqop::exit_code(r.report));
        all.push_back(r.report.to_json());
      }
      if (!cfg.csv_path.empty()) {
        std::ofstream out(cfg.csv_path);
        if (!out) throw cmqop::ConfigError("csv: cannot open '" + cfg.csv_path + "'");
        cmqop::write_sweep_csv(out, cfg.sweep_axis, rows);
      }
      if (!quiet || cfg.csv_path.empty()) cmqop::write_sweep_csv(std::cout, cfg.sweep_axis, rows);
      if (!cfg.json_path.empty()) write_json(cfg.json_path, all);
      return code;
    }

    const auto report = cmqop::run(cfg);
    if (!quiet) report.print_table(std::cout);
    if (!cfg.json_path.empty()) write_json(cfg.json_path, report.to_json());
    return cmqop::exit_code(report);
  } catch (const cmqop::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  }
}
