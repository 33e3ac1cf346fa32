#pragma once

// Spectral clustering of the consensus embedding: kNN Gaussian affinity,
// symmetric normalized Laplacian, bottom-k eigenvectors, k-means.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mlmf/linear_mlmf.hpp"

namespace mlmf {

struct SimilarityGraph {
  MatrixXd weights;  // N x N, symmetric, zero diagonal, entries in [0, 1]
  Index k_neighbors = 0;
  double sigma = 1.0;
  bool degenerate = false;  // every point identical
};

struct ClusterAssignment {
  std::vector<int> labels;  // in [0, k), renumbered by first appearance
  std::vector<std::string> global_ids;
  int k = 0;

  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

/// Default neighbourhood size ceil(log2 N) + 1, capped at N - 1.
Index default_k_neighbors(Index n);

/// Median distance from every point to each of its k nearest neighbours.
double median_knn_distance(const MatrixXd& points, Index k_neighbors);

/// Columns of `points` are samples. W_ij = exp(-|h_i - h_j|^2 / (2 sigma^2))
/// when i is among j's k nearest neighbours or j among i's; ties broken by
/// index. A missing sigma selects median_knn_distance.
SimilarityGraph knn_similarity(const MatrixXd& points, Index k_neighbors, std::optional<double> sigma = std::nullopt);

/// I - D^{-1/2} W D^{-1/2}; throws IsolatedVertex for a zero-degree row.
MatrixXd normalized_laplacian(const MatrixXd& weights);

struct SpectralEmbedding {
  MatrixXd vectors;         // N x k
  Eigen::VectorXd values;   // k smallest eigenvalues, ascending
};

/// Eigenvectors of the k smallest eigenvalues, optionally with unit-norm rows.
SpectralEmbedding spectral_embed(const MatrixXd& laplacian, Index k, bool normalize_rows = true);

struct KMeansOptions {
  int restarts = 10;
  int max_iters = 300;
  std::uint64_t seed = 0;
};

struct KMeansResult {
  std::vector<int> labels;
  MatrixXd centers;                 // dims x k
  double inertia = 0.0;             // within-cluster sum of squares
  std::vector<double> inertia_trace;  // per Lloyd iteration of the winning restart
};

/// Rows of `points` are observations. Lloyd iterations from k-means++ seeds,
/// best of `restarts` by inertia.
KMeansResult kmeans(const MatrixXd& points, int k, const KMeansOptions& options = {});

/// Relabels so clusters are numbered in order of first appearance.
std::vector<int> canonical_labels(const std::vector<int>& labels);

struct SpectralOptions {
  std::optional<Index> k_neighbors;
  std::optional<double> sigma;
  bool normalize_rows = true;
  KMeansOptions kmeans;
};

ClusterAssignment spectral_cluster(const ConsensusEmbedding& embedding, int k, const SpectralOptions& options = {});

}  // namespace mlmf
