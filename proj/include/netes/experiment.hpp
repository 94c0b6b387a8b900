#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netes/config.hpp"

namespace netes {

struct IterationRow {
  std::uint64_t iteration = 0;
  double best_raw_reward = 0.0;
  double mean_raw_reward = 0.0;
  bool broadcast = false;
  std::optional<double> eval_reward;
  std::optional<double> update_variance;
  std::optional<double> bound_rhs;
  std::optional<bool> bound_holds;
};

struct RunResult {
  std::string config_name;
  std::uint64_t seed = 0;
  std::vector<IterationRow> rows;
  std::vector<double> evals;     // evaluation history, in order
  double initial_eval = 0.0;     // best noise-free reward of the initial population
  double final_metric = 0.0;     // max(evals)
  bool plateaued = false;
  std::optional<std::string> error;  // set when the run aborted
  double graph_density = 0.0;

  bool ok() const noexcept { return !error.has_value(); }
};

// Mean reward of `episodes` noise-free evaluations.
double evaluate_policy(const Eigen::Ref<const Eigen::VectorXd>& theta, const Objective& objective,
                       std::size_t episodes);

// True once the moving average over the last `window` entries differs from
// the one `window` entries earlier by at most threshold * |earlier|. An
// earlier average of exactly 0 is compared with an absolute tolerance 1e-8.
bool detect_plateau(std::span<const double> history, std::size_t window = 50,
                    double threshold = 0.05);

// Builds the run's communication graph (edge list, edgeless control, or a
// connected sample of the configured family).
Graph build_topology(const ExperimentConfig& config, std::uint64_t seed);

RunResult run_seed(const ExperimentConfig& config, std::uint64_t seed);

// One result per config seed, in seed order. Seeds run on up to `threads`
// workers; a failing seed is recorded and the others continue.
std::vector<RunResult> run_experiment(const ExperimentConfig& config, std::size_t threads = 1);

struct Summary {
  std::string config_name;
  std::size_t runs = 0;     // successful runs
  std::size_t failed = 0;
  double mean = 0.0;
  std::optional<double> ci95_half_width;  // empty with a single run
};

// t-based 95% interval, runs - 1 degrees of freedom. Throws InvalidArgument on
// empty input.
Summary aggregate(std::span<const double> final_metrics);
Summary aggregate_runs(const std::vector<RunResult>& results);

// Column order: iteration,best_raw_reward,mean_raw_reward,broadcast,
// eval_reward,update_variance,bound_rhs,bound_holds
std::string iteration_csv(const RunResult& result);
std::string summary_csv(const std::vector<Summary>& summaries);
// Mean best-raw-reward curve across runs with a 95% band.
std::string training_curve_svg(const std::string& title, const std::vector<RunResult>& results);

struct ExperimentOutput {
  ExperimentConfig config;
  std::vector<RunResult> results;
};

// Writes, under outdir:
//   summary.csv
//   <name>/config.json, <name>/seed_<s>.csv, <name>/curve.svg
// Every file is written to a temporary and renamed into place.
std::vector<Summary> emit_outputs(const std::vector<ExperimentOutput>& experiments,
                                  const std::string& outdir);

}  // namespace netes
