#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace cmqop {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "report-v1";

enum class Experiment {
  IntEq,
  KernelId,
  Commutator,
  DiffEq,
  Asymptotics,
  FourierGamma,
  L2Eigen,
  HrEigen,
};

std::string to_string(Experiment e);
/// Throws ConfigError for unknown names.
Experiment parse_experiment(const std::string& name);

/// Everything a run needs. Zero / empty fields mean "experiment default".
struct ExperimentConfig {
  Experiment experiment = Experiment::DiffEq;
  int N = 2;
  double lambda = 1.5;
  std::vector<double> u;
  double xi = 0.3;
  double xi2 = 1.1;
  /// int-eq: evaluation points, flattened N at a time.
  std::vector<double> t;
  /// int-eq: xi values checked at every point (overrides xi).
  std::vector<double> xi_list;
  int panels = 0;
  int order = 0;
  /// Acceptance tolerance of the experiment's main residual.
  double tol = 0.0;
  /// Tail tolerance handed to truncation_radius.
  double radius_tol = 0.0;
  double radius = 0.0;
  double margin = 0.0;
  double wall_guard = 0.0;
  double h = 0.0;
  int draws = 0;
  int threads = 1;
  std::uint64_t seed = 12345;
  bool r3 = false;
  std::string json_path;
  std::string csv_path;
  std::string sweep_axis;
  std::vector<double> sweep_values;
  std::string dump_table;
  std::string dump_grid;
  std::string dump_matrix;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  nlohmann::json to_json() const;
};

/// key = value lines, '#' comments, keys as the long CLI flags. Unknown keys
/// and malformed values raise ConfigError with the line number.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});
/// Applies one key = value pair (shared by the file parser and the CLI).
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

std::vector<double> parse_csv_doubles(const std::string& text);

/// One named residual with its tolerance; passes iff residual <= tolerance.
/// Range checks are phrased as distances (|ratio - 4| <= 0.8 and so on).
struct Check {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;

  friend bool operator==(const Check&, const Check&) = default;
};

struct VerificationReport {
  std::string schema = kReportSchema;
  std::string version = kVersion;
  std::string experiment;
  nlohmann::json config;
  std::vector<Check> checks;
  nlohmann::json diagnostics = nlohmann::json::object();
  /// Name and value of the quantity a sweep tabulates.
  std::string metric;
  double metric_value = 0.0;
  /// Residuals reported without judgment (lambda in (0, 1)).
  bool exploratory = false;
  /// Set when the run aborted on a numerical failure.
  std::string error;
  double wall_time_ms = 0.0;
  std::uint64_t seed = 0;
  bool pass = false;

  void add_check(std::string name, double residual, double tolerance, std::string note = {});
  /// Recomputes pass from the checks and the error field.
  void finalize();
  nlohmann::json to_json() const;
  static VerificationReport from_json(const nlohmann::json& j);
  void print_table(std::ostream& out) const;

  friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

/// Runs one experiment. Numerical failures are caught and recorded in
/// report.error; configuration errors propagate as ConfigError.
VerificationReport run(const ExperimentConfig& cfg);

/// One row per value; a failing row records its error and the sweep goes on.
/// Columns: axis,value,pass,metric,metric_value,mu_xi,worst_ratio,wall_time_ms,error
struct SweepRow {
  double value = 0.0;
  VerificationReport report;
  double mu_xi = 0.0;
};
std::vector<SweepRow> sweep(const ExperimentConfig& base, const std::string& axis,
                            const std::vector<double>& values);
void write_sweep_csv(std::ostream& out, const std::string& axis, const std::vector<SweepRow>& rows);

/// Exit status for a finished report: 0 pass, 1 check failed, 3 numerical failure.
int exit_code(const VerificationReport& report);

}  // namespace cmqop
