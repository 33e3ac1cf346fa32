#pragma once

// Cluster quality measures: multi-group logrank test, clinical enrichment
// counts, partition agreement scores, and a synthetic multi-view generator.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mlmf/data_model.hpp"
#include "mlmf/spectral.hpp"

namespace mlmf {

inline constexpr double kSignificanceLevel = 0.05;

/// Upper tail P(X > statistic) of a chi-square distribution.
double chi_square_sf(double statistic, double dof);

// ---- survival -----------------------------------------------------------

struct SurvivalRecord {
  std::string sample_id;
  double time = 0.0;  // days
  bool event = false;  // true: death observed, false: censored
};

struct LogrankResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
  std::vector<double> observed;  // per group, groups ordered by label
  std::vector<double> expected;
};

/// Multi-group logrank test. `labels[i]` is the group of `records[i]`.
LogrankResult logrank_test(const std::vector<SurvivalRecord>& records, const std::vector<int>& labels);

/// Matches records to an assignment by sample id; samples without a survival
/// record are skipped.
LogrankResult logrank_test(const std::vector<SurvivalRecord>& records, const ClusterAssignment& assignment);

/// CSV with columns sample_id,time,event (event in {0,1}).
std::vector<SurvivalRecord> read_survival(const std::filesystem::path& path);

// ---- clinical enrichment ------------------------------------------------

inline constexpr std::array<const char*, 6> kClinicalParameters = {
    "gender", "age_at_diagnosis", "pathology_T", "pathology_N", "pathology_M", "pathologic_stage"};

/// Per-sample clinical values; an absent key or empty string is a missing cell.
struct ClinicalTable {
  std::map<std::string, std::map<std::string, std::string>> rows;  // sample -> parameter -> value
};

ClinicalTable read_clinical(const std::filesystem::path& path);

struct ParameterTest {
  std::string parameter;
  std::string test;  // "chi_square" or "kruskal_wallis"
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
  std::size_t samples = 0;
  bool small_expected_counts = false;
};

struct EnrichmentResult {
  std::vector<ParameterTest> tests;  // one per clinical parameter, fixed order
  int enriched_count = 0;
  std::vector<std::string> warnings;
};

/// Chi-square test of independence on the cluster x category table.
ParameterTest chi_square_independence(const std::vector<int>& labels, const std::vector<std::string>& categories);

/// Kruskal-Wallis H test with tie correction.
ParameterTest kruskal_wallis(const std::vector<int>& labels, const std::vector<double>& values);

EnrichmentResult enrichment_analysis(const ClinicalTable& clinical, const ClusterAssignment& assignment);

// ---- partition agreement ------------------------------------------------

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);
/// Mutual information normalized by the arithmetic mean of the two entropies.
double normalized_mutual_information(const std::vector<int>& a, const std::vector<int>& b);

struct EvaluationReport {
  std::optional<double> logrank_p;
  std::optional<double> neg_log10_p;
  std::optional<int> enriched_count;
  std::map<std::string, double> per_parameter_p;
  std::optional<double> ari;
  std::optional<double> nmi;

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

// ---- synthetic data -----------------------------------------------------

struct SyntheticViewSpec {
  Index dim = 100;
  double noise_sigma = 0.1;
};

struct SyntheticSpec {
  int n_clusters = 3;
  int samples_per_cluster = 50;
  std::vector<SyntheticViewSpec> views{{100, 0.1}, {80, 0.1}};
  Index latent_dim = 10;
  /// Closest pair of cluster centers sits this far apart per coordinate (RMS).
  double separation = 0.5;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  MultiOmicsDataset dataset;
  std::vector<int> labels;  // aligned with dataset.global_ids()
};

/// Cluster centers drawn in a latent space, pushed through a random linear map
/// per view, plus isotropic Gaussian noise. Views are named view1, view2, ...
SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Two-column CSV sample_id,<column>.
std::vector<std::pair<std::string, int>> read_labels(const std::filesystem::path& path);
std::string labels_csv(const std::vector<std::string>& ids, const std::vector<int>& labels,
                       const std::string& column = "cluster");

}  // namespace mlmf
