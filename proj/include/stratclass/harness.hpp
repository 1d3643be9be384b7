// Experiment orchestration: config loading, the round loop wiring agents to
// the optimizer across the information barrier, regret accounting against
// the hindsight baseline, sweeps, and file emission.
#ifndef STRATCLASS_HARNESS_HPP
#define STRATCLASS_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "stratclass/baseline.hpp"
#include "stratclass/environment.hpp"
#include "stratclass/errors.hpp"
#include "stratclass/losses.hpp"
#include "stratclass/optimizer.hpp"

namespace stratclass {

// ---------------------------------------------------------------- config --

struct StochasticStreamConfig {
  double theta = 0.0;
  XSamplerSpec sampler;
};

struct StreamConfig {
  // Exactly one is set.
  std::optional<std::string> scripted_path;
  std::optional<StochasticStreamConfig> stochastic;
};

struct BaselineBudget {
  std::int64_t iterations = 100000;
  double tol = 1e-4;
};

// Parsed experiment description ("schema": 1 JSON documents; see README for
// the field list). cost is the experiment-level cost family; scripted rows
// may declare their own transforms but must keep eps at or above the
// experiment floor.
struct ExperimentConfig {
  std::int64_t n = 0;
  int d = 0;
  double R1 = 1.0;
  double R2 = 1.0;
  LossKind loss = LossKind::logistic;
  StreamConfig stream;
  CostSpec cost;
  double theta_hat_fixed = -1.0;  // < 0 means "auto"
  double theta_hat_slack = 1.1;
  std::uint64_t seed = 0;
  int replicates = 20;
  BaselineBudget baseline;
  std::string out_dir = "out";
  bool round_log = true;
  nlohmann::json echo;  // original document, re-emitted as config-echo.json
};

/// Parses and validates a config document. Construction failures of nested
/// pieces (exponents, transforms, samplers) are wrapped in ConfigError with
/// the offending path.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// Scripted agent CSV: one row per round, columns
///   y, x_1..x_d [, p, r, eps, A_11..A_dd row-major]   (tail required iff y=-1)
/// "#" lines are comments; "inf" is accepted for p. eps_floor enforces the
/// experiment-level singular-value margin on every row.
std::vector<AgentProfile> load_scripted_csv(const std::string& path, int d,
                                            double eps_floor);

// ---------------------------------------------------------------- records --

struct RoundRecord {
  std::int64_t t = 0;          // 1-based round index
  Eigen::VectorXd beta_plus;   // deployed (perturbed) weights
  int y = 0;
  Eigen::VectorXd xhat;        // features the agent presented
  double suffered_loss = 0.0;  // observed_loss at beta_plus
  bool strategic_feedback = false;
  double cumulative_loss = 0.0;
};

struct CheckpointEntry {
  std::int64_t t = 0;
  double cum_loss = 0.0;
  double baseline_loss = 0.0;  // hindsight optimum of the first t rounds
  double baseline_gap = 0.0;
  double regret = 0.0;
};

struct RegretReport {
  std::int64_t n = 0;
  int d = 0;
  double theta_realized = 0.0;
  double theta_hat = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double M = 0.0;
  double L = 0.0;
  double C = 0.0;
  double cum_loss = 0.0;
  double baseline_loss = 0.0;
  double baseline_gap = 0.0;
  double regret = 0.0;
  std::vector<CheckpointEntry> checkpoints;  // powers of two plus n
  double gamma_fit = 0.0;  // log-log slope of checkpoint regret vs t; NaN if
                           // fewer than two positive points
  std::uint64_t seed = 0;
};

struct RunOutcome {
  std::vector<RoundRecord> records;      // complete, or partial on abort
  std::optional<RegretReport> report;    // absent when aborted
  std::string abort_error;               // UnboundedResponse text on abort
  int d = 0;
};

/// One seeded end-to-end run: realize stream, build constants and schedule,
/// drive the round loop, solve the baseline (full horizon plus power-of-two
/// prefixes), and assemble the report. An UnboundedResponse mid-run yields a
/// partial RunOutcome instead of propagating; ScheduleInfeasible,
/// ZeroSmoothingStrategicRound and ConfigError propagate.
RunOutcome run_experiment(const ExperimentConfig& config);

/// Sum of suffered losses minus the baseline's total. Throws LengthMismatch
/// when the record list and baseline cover different round counts.
double stackelberg_regret(const std::vector<RoundRecord>& records,
                          const HindsightSolution& baseline);

// ------------------------------------------------------------------ sweep --

struct SweepRow {
  double theta = 0.0;
  std::int64_t n = 0;
  int replicates = 0;
  std::optional<RegretReport> report;    // replicate 0
  std::vector<double> replicate_regrets;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  std::string error;  // nonempty when the cell failed; sweep continues
};

struct SweepThetaFit {
  double theta = 0.0;
  double gamma_fit = 0.0;  // slope of log mean regret vs log n
};

struct SweepTable {
  std::vector<SweepRow> rows;  // theta-major order
  std::vector<SweepThetaFit> gamma_by_theta;
};

/// Grid of (theta, n) cells. Within a cell the agent stream and baseline are
/// shared and replicates differ only in the optimizer's draw stream; seeds
/// follow derive_seed(seed, role, cell, replicate) with theta-major cell
/// indices, so a one-cell sweep reproduces run_experiment exactly. Cells run
/// in parallel; failures are recorded per cell. Empty grids fall back to the
/// config's own n / theta.
SweepTable sweep(const ExperimentConfig& config,
                 std::vector<std::int64_t> n_values,
                 std::vector<double> theta_values);

// ------------------------------------------------------------------- emit --

/// Writes rounds.csv (17-significant-digit round-trip formatting),
/// report.json, and config-echo.json into directory, overwriting
/// byte-identically for identical inputs. report may be null (aborted runs:
/// partial rounds.csv only). When round_log was off, records may be empty
/// while the report still carries totals.
void emit(const std::vector<RoundRecord>& records, const RegretReport* report,
          int d, const std::string& directory,
          const nlohmann::json* config_echo = nullptr);

/// Writes sweep.csv / sweep.json (the rate table) plus config-echo.json.
void emit_sweep(const SweepTable& table, const std::string& directory,
                const nlohmann::json* config_echo = nullptr);

}  // namespace stratclass

#endif  // STRATCLASS_HARNESS_HPP
