#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "subzero/regret.hpp"
#include "subzero/solvers.hpp"

namespace subzero::bench {

/// One experiment: a problem spec, a solver, its parameters and the seeds to
/// replicate over. Each seed drives the oracle and, unless the problem spec
/// fixes its own "seed", the instance generator.
struct ExperimentConfig {
  nlohmann::json problem;  // kind, n, seed, domain, parameters
  std::string solver;  // dp | comparator | value | regret-nv
  std::optional<double> eps;
  std::optional<long long> horizon;  // T
  double delta = 0.1;
  double sigma = 0.0;
  std::vector<std::uint64_t> seeds{0};
  std::string out;
  std::string format = "csv";
  std::optional<long long> max_queries;
};

/// Parses and validates an experiment object. Throws ConfigError naming the field.
ExperimentConfig experiment_from_json(const nlohmann::json& j);
void validate(const ExperimentConfig& cfg);

struct RunReport {
  std::string run_id;
  std::string solver;
  std::string problem_kind;
  int n = 0;
  std::uint64_t seed = 0;
  Vector point;
  double suboptimality = 0.0;
  long long total_queries = 0;
  double query_bound = 0.0;
  /// eps for the optimizers, the regret bound for regret-nv.
  double theorem_bound = 0.0;
  double cumulative_regret = 0.0;
  bool accuracy_ok = false;  // suboptimality <= eps, or regret <= bound
  bool queries_ok = false;
  bool bound_satisfied = false;  // both of the above
  double wall_seconds = 0.0;
  long long infeasible_queries = 0;
  RunTrace trace;
};

/// Runs one seed. Throws AssumptionError when the interior assumption fails.
RunReport run_one(const ExperimentConfig& cfg, std::uint64_t seed);

/// Runs every seed of cfg in order.
std::vector<RunReport> run(const ExperimentConfig& cfg);

/// Exact CSV column order of trace output.
const std::vector<std::string>& csv_columns();
std::string format_double(double v);
std::string to_csv(const std::vector<RunReport>& reports, bool header = true);
std::string to_json(const std::vector<RunReport>& reports);
std::string render(const std::vector<RunReport>& reports, const std::string& format);

/// Writes via a temporary file and rename.
void write_atomic(const std::string& path, const std::string& content);

/// Cross product of problems x solvers x n x (eps or T) x seeds.
struct SweepGrid {
  std::vector<std::string> problems{"quadratic"};
  std::vector<std::string> solvers{"dp"};
  std::vector<int> dims{2};
  std::vector<double> eps{1e-2};
  std::vector<long long> horizons{100000};
  double delta = 0.1;
  double sigma = 0.0;
  std::vector<std::uint64_t> seeds{0};
  std::optional<long long> max_queries;
};

SweepGrid sweep_from_json(const nlohmann::json& j);

/// Expands the grid into single-seed experiments in deterministic order.
std::vector<ExperimentConfig> expand(const SweepGrid& grid);

struct SweepCell {
  std::string problem;
  std::string solver;
  int n = 0;
  std::string parameter;  // "eps=..." or "T=..."
  int runs = 0;
  int passed = 0;
  double median_queries = 0.0;
  double median_suboptimality = 0.0;
  double median_regret = 0.0;
  bool ok = false;
};

struct SweepResult {
  std::vector<RunReport> reports;  // in expand() order
  std::vector<SweepCell> cells;
  std::vector<std::string> errors;  // per-run failures, in order
  bool all_ok = false;
};

/// Runs the grid on up to `jobs` threads. Reports are merged in grid order
/// regardless of completion order. A cell passes when every run satisfies
/// its bounds; regret cells pass when at least (1 - delta) of the seeds do.
/// When cell_dir is non-empty each run's trace is written there atomically.
SweepResult sweep(const SweepGrid& grid, int jobs, const std::string& cell_dir = "",
                  const std::string& format = "csv");

std::string summary_table(const std::vector<SweepCell>& cells);

}  // namespace subzero::bench
