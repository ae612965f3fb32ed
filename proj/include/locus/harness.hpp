#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "locus/io.hpp"
#include "locus/rigidity.hpp"
#include "locus/solver.hpp"

namespace locus {

enum class SweepKind { kN, kR, kDelta };

std::string_view to_string(SweepKind kind);
std::optional<SweepKind> parse_sweep_kind(std::string_view name);

/// One of the three scaling experiments. Every cell (value, seed) samples a
/// configuration, builds G(n, r), draws mixture noise and localizes.
struct ExperimentConfig {
  std::string name;
  SweepKind kind = SweepKind::kDelta;
  int d = 2;
  int n = 150;
  // Fixed radius for the delta sweep, and for the n sweep when set. When unset
  // the n sweep uses alpha (log n / n)^(1/d).
  std::optional<double> r;
  double alpha = 3.0;
  double delta = 0.005;
  double eps_mix = 0.1;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::uint64_t master_seed = 2011;
  SolverParams solver;
  int threads = 1;
  bool record_wall_time = true;  // false writes wall_s = 0 so reruns are byte-identical
};

enum class CellStatus { kOk, kDisconnected, kFailed };

std::string_view to_string(CellStatus status);
std::optional<CellStatus> parse_cell_status(std::string_view name);

struct CellRecord {
  double sweep_value = 0.0;
  std::uint64_t seed = 0;
  double metric = 0.0;
  double trace = 0.0;
  double max_violation = 0.0;
  int iterations = 0;
  bool converged = false;
  double wall_s = 0.0;
  CellStatus status = CellStatus::kOk;
  std::string detail;  // failure message; not part of the CSV
};

struct CellAggregate {
  double sweep_value = 0.0;
  int count = 0;  // successful seeds
  int skipped = 0;
  double mean_metric = 0.0;
  double std_metric = 0.0;
  double mean_log_metric = 0.0;
  double std_log_metric = 0.0;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  int points = 0;
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<CellRecord> records;  // ordered by (value, seed) as listed in the config
  std::vector<CellAggregate> aggregates;
  std::optional<SlopeFit> slope;  // on (log value, mean log metric); needs 3 values
};

void validate(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(std::string_view text);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

/// Radius, vertex count and noise budget used for a sweep value.
struct CellParameters {
  int n = 0;
  double r = 0.0;
  double delta = 0.0;
};
CellParameters cell_parameters(const ExperimentConfig& cfg, double value);

/// Seed for a cell, derived from the master seed and the cell coordinates so
/// neither execution order nor the rest of the grid can change it.
std::uint64_t cell_seed(const ExperimentConfig& cfg, double value, std::uint64_t seed);

CellRecord run_cell(const ExperimentConfig& cfg, double value, std::uint64_t seed);

using ProgressFn = std::function<void(const CellRecord&, std::size_t done, std::size_t total)>;
SweepResult run_sweep(const ExperimentConfig& cfg, const ProgressFn& progress = {});

std::vector<CellAggregate> aggregate(const std::vector<CellRecord>& records, const std::vector<double>& values);

/// Ordinary least squares on (log x, log y).
SlopeFit loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

/// Slope of the predicted scaling for each sweep (2, -4, 1).
double reference_slope(SweepKind kind);

std::string results_csv(const std::vector<CellRecord>& records);
std::vector<CellRecord> parse_results_csv(std::string_view text);
std::string summary_json(const SweepResult& res);
/// Empty when there is nothing to plot.
std::string loglog_svg(const SweepResult& res);

/// Writes results.csv, summary.json and (when non-empty) plot.svg into dir,
/// creating it if needed.
void emit_report(const SweepResult& res, const std::string& dir);

/// Rotates/reflects and shifts xhat onto x in the least-squares sense. For
/// plots only; the error metric never aligns.
Matrix procrustes_align(const Matrix& x, const Matrix& xhat);

std::string rigidity_report_json(const Instance& inst, StressMode mode);

}  // namespace locus
