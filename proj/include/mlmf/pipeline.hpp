#pragma once

// Batch orchestration: configuration, ingestion, fit -> cluster -> evaluate,
// missing-view simulation and report files.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlmf/evaluation.hpp"
#include "mlmf/nonlinear_mlmf.hpp"

namespace mlmf {

enum class SolverMode { Linear, Nonlinear };

std::string_view to_string(SolverMode mode) noexcept;
SolverMode parse_mode(std::string_view name);

struct ViewSource {
  std::string name;
  std::filesystem::path path;
  bool samples_as_rows = false;

  friend bool operator==(const ViewSource&, const ViewSource&) = default;
};

struct RunConfig {
  SolverMode mode = SolverMode::Linear;
  std::vector<ViewSource> views;
  std::optional<std::filesystem::path> survival;
  std::optional<std::filesystem::path> clinical;
  std::optional<std::filesystem::path> labels;  // ground truth for ARI / NMI
  std::vector<Index> layer_sizes;  // empty: {32, n_clusters}
  int n_clusters = 3;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  Activation activation = Activation::Sigmoid;
  std::optional<Index> k_neighbors;  // unset: ceil(log2 N) + 1
  std::optional<double> sigma;       // unset: median kNN distance
  std::uint64_t seed = 0;
  int max_iters = 500;
  double tol = 1e-6;
  double alpha0 = 1e-2;
  bool zscore = true;
  int kmeans_restarts = 10;
  std::filesystem::path output_dir = "mlmf_out";

  /// Throws BadConfig for out-of-range values and MissingFile for absent inputs.
  void validate() const;

  /// Auto sizes shrink the first layer to `max_rank` (the smallest
  /// min(D_v, N_v) of the data being fitted).
  std::vector<Index> resolved_layer_sizes(Index max_rank = 32) const;
  SolverConfig linear_config() const;
  NonlinearSolverConfig nonlinear_config() const;
  SpectralOptions spectral_options() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Flat key = value file. Top-level keys configure the run; each
/// `[view NAME]` section names one input matrix (`path`, optional
/// `samples_as_rows`). Relative paths resolve against the file's directory.
RunConfig load_config(const std::filesystem::path& path);
std::string config_ini(const RunConfig& config);

struct RunReport {
  std::string version;
  RunConfig config;
  std::uint64_t seed = 0;
  std::vector<double> loss_trace;
  int iterations = 0;
  std::string status;
  double wall_clock_seconds = 0.0;
  ClusterAssignment assignment;
  EvaluationReport evaluation;
  std::vector<std::string> warnings;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

nlohmann::json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EvaluationReport& report);
EvaluationReport evaluation_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

/// Reads every view and z-scores it when the config asks for it.
MultiOmicsDataset load_dataset(const RunConfig& config);

/// Scores an assignment against whichever of survival / clinical / truth
/// labels the config names.
EvaluationReport evaluate_assignment(const ClusterAssignment& assignment, const RunConfig& config,
                                     std::vector<std::string>* warnings = nullptr);

/// Fit, cluster and evaluate a dataset that is already preprocessed.
RunReport run_pipeline(const RunConfig& config, const MultiOmicsDataset& dataset);

/// run_pipeline on the configured inputs, then writes assignment.csv,
/// loss_trace.csv and report.json into the output directory.
RunReport cmd_fit(const RunConfig& config);

struct GridRow {
  double rate = 0.0;
  int repeat = 0;
  RunReport report;
};

inline const std::vector<double> kDefaultMissingRates = {0.1, 0.3, 0.5, 0.7};

/// For every rate x repeat: masks the view, fits, clusters and evaluates.
/// Rows come back rate-major, repeat-minor; grid.csv is written to the
/// output directory.
std::vector<GridRow> cmd_simulate_missing(const RunConfig& config, const std::string& view,
                                          const std::vector<double>& rates, int repeats, int threads = 0);

std::string grid_csv(const std::vector<GridRow>& rows);

/// Writes view CSVs, labels.csv and a ready-to-run run.ini into `out_dir`.
SyntheticData cmd_generate(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

/// Re-scores an assignment CSV (sample_id,cluster).
EvaluationReport cmd_evaluate(const std::filesystem::path& assignment, const RunConfig& sources,
                              const std::optional<std::filesystem::path>& out_file);

ClusterAssignment read_assignment(const std::filesystem::path& path);

/// Seed for one simulation cell, mixed from the run seed and the cell index.
std::uint64_t cell_seed(std::uint64_t seed, std::size_t rate_index, int repeat);

std::string_view library_version() noexcept;

}  // namespace mlmf
