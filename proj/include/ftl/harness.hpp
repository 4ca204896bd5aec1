#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ftl/atomiser.hpp"
#include "ftl/diagnostics.hpp"
#include "ftl/dynamics.hpp"
#include "ftl/reference.hpp"
#include "ftl/velocity_model.hpp"

namespace ftl {

enum class ReferenceKind { automatic, exact, finite_volume };

struct ExperimentConfig {
  VelocityModel model = VelocityModel::power_law(1.0, 1.0);
  std::string datum_spec;
  InitialDatum datum{{0.0, 1.0}, {1.0}};
  std::vector<std::size_t> n_values;
  SolverConfig solver;
  DiagnosticOptions diagnostics;
  std::filesystem::path out_dir = "out";
  std::vector<double> schedule;       // sorted, unique, in (0, t_end]
  std::vector<double> dyadic_times;   // subset of schedule used for the near-zero check
  std::optional<double> window_m;     // default: the support law at t_end
  std::optional<double> window_delta; // default: 0.05 * t_end
  ReferenceKind reference = ReferenceKind::automatic;
  std::optional<double> reference_dx;
  double reference_cfl = 0.9;
  std::size_t compare_points = 1000;
  bool write_trajectory = true;

  double delta() const { return window_delta.value_or(0.05 * solver.t_end); }
  double window() const;
  /// Scheduled times t >= delta (t_end when the schedule has none).
  std::vector<double> evaluation_times() const;
};

/// `key = value` lines; `#` starts a comment; `[section]` prefixes following
/// keys with `section.`. Unknown keys, malformed values and violated
/// invariants throw ConfigError. Relative `file:` datum paths resolve against
/// `base_dir`.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

struct CliOverrides {
  std::optional<std::filesystem::path> out_dir;
  std::optional<double> tol_scale;
  bool seedless = false; // nothing is random; accepted for interface stability
};
void apply_overrides(ExperimentConfig& config, const CliOverrides& overrides);

/// Writes to `path.tmp` and renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

std::string trajectory_csv(const Trajectory& trajectory);
std::string field_csv(const DensityField& field);
std::string report_json(const DiagnosticReport& report);
std::string series_csv(const DiagnosticReport& report);
std::string grid_csv(const GridSolution& grid);

struct RunEntry {
  std::size_t n = 0;
  Trajectory trajectory;
  DiagnosticReport report;
};

/// Atomise, integrate and diagnose one n.
RunEntry run_one(const ExperimentConfig& config, std::size_t n);

/// Entries for every n, computed concurrently; order follows `n_values`.
std::vector<RunEntry> run_sweep(const ExperimentConfig& config);

struct ConvergenceRow {
  std::size_t n = 0;
  double error = 0.0;                // max over evaluation times of the window L1 error
  std::optional<double> order;       // against the previous row
  bool diagnostics_pass = true;
  std::string first_failure;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::string reference;             // "exact" or "fv"
  double reference_self_error = 0.0; // 0 for the exact reference
  bool inconclusive = false;
  bool decreasing = true;            // each error <= 1.05 * previous, last < first

  std::string csv() const;
};

/// Command entry points: artifacts go to config.out_dir, progress to `log`.
/// Return the process exit code: 0 success, 1 failed estimate or convergence,
/// 3 inconclusive reference. Config errors propagate as ConfigError (exit 2).
int command_run(const ExperimentConfig& config, std::ostream& log);
int command_diagnose(const ExperimentConfig& config, std::ostream& log);
int command_converge(const ExperimentConfig& config, std::ostream& log, ConvergenceTable* table = nullptr);
int command_compare(const ExperimentConfig& config, std::ostream& log);

ConvergenceTable converge(const ExperimentConfig& config, const std::vector<RunEntry>& entries);

}  // namespace ftl
