#include "mlmf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "mlmf/error.hpp"

namespace mlmf {

namespace {

MatrixXd pairwise_squared_distances(const MatrixXd& points) {
  const Index n = points.cols();
  MatrixXd d2 = MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double v = (points.col(i) - points.col(j)).squaredNorm();
      d2(i, j) = v;
      d2(j, i) = v;
    }
  }
  return d2;
}

// Indices of the k nearest other points of i, ties broken by index.
std::vector<Index> nearest(const MatrixXd& d2, Index i, Index k) {
  std::vector<Index> order;
  order.reserve(d2.rows() - 1);
  for (Index j = 0; j < d2.rows(); ++j) {
    if (j != i) order.push_back(j);
  }
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return d2(i, a) < d2(i, b); });
  order.resize(static_cast<std::size_t>(k));
  return order;
}

void check_neighbors(Index n, Index k) {
  if (k < 1 || k >= n) {
    raise(ErrorCode::DegenerateShape, "k_neighbors must lie in [1, N-1]; got " + std::to_string(k) +
                                          " for N=" + std::to_string(n));
  }
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

}  // namespace

Index default_k_neighbors(Index n) {
  if (n < 2) return 1;
  const auto k = static_cast<Index>(std::ceil(std::log2(static_cast<double>(n)))) + 1;
  return std::min(k, n - 1);
}

double median_knn_distance(const MatrixXd& points, Index k_neighbors) {
  check_neighbors(points.cols(), k_neighbors);
  const MatrixXd d2 = pairwise_squared_distances(points);
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(points.cols() * k_neighbors));
  for (Index i = 0; i < points.cols(); ++i) {
    for (Index j : nearest(d2, i, k_neighbors)) dist.push_back(std::sqrt(d2(i, j)));
  }
  return median(std::move(dist));
}

SimilarityGraph knn_similarity(const MatrixXd& points, Index k_neighbors, std::optional<double> sigma) {
  const Index n = points.cols();
  check_neighbors(n, k_neighbors);
  if (sigma && !(*sigma > 0.0)) raise(ErrorCode::BadConfig, "sigma must be > 0");
  if (!points.allFinite()) raise(ErrorCode::NonFiniteInput, "embedding contains NaN or Inf");

  SimilarityGraph graph;
  graph.k_neighbors = k_neighbors;
  const MatrixXd d2 = pairwise_squared_distances(points);
  if (d2.maxCoeff() == 0.0) {
    graph.degenerate = true;
    graph.sigma = sigma.value_or(1.0);
    graph.weights = MatrixXd::Ones(n, n);
    graph.weights.diagonal().setZero();
    return graph;
  }

  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> linked(n, n);
  linked.setConstant(false);
  std::vector<double> knn_dist;
  knn_dist.reserve(static_cast<std::size_t>(n * k_neighbors));
  for (Index i = 0; i < n; ++i) {
    for (Index j : nearest(d2, i, k_neighbors)) {
      linked(i, j) = true;
      linked(j, i) = true;
      knn_dist.push_back(std::sqrt(d2(i, j)));
    }
  }
  if (sigma) {
    graph.sigma = *sigma;
  } else {
    graph.sigma = median(knn_dist);
    if (graph.sigma <= 0.0) graph.sigma = std::sqrt(d2.maxCoeff());
  }

  const double scale = 2.0 * graph.sigma * graph.sigma;
  graph.weights = MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (!linked(i, j)) continue;
      // A far outlier's kernel weights can underflow to 0; keep kNN edges
      // alive at the smallest normal double so no vertex loses its degree.
      const double w = std::max(std::exp(-d2(i, j) / scale), std::numeric_limits<double>::min());
      graph.weights(i, j) = w;
      graph.weights(j, i) = w;
    }
  }
  return graph;
}

MatrixXd normalized_laplacian(const MatrixXd& weights) {
  const Index n = weights.rows();
  if (weights.cols() != n) raise(ErrorCode::ShapeMismatch, "affinity matrix must be square");
  const Eigen::VectorXd degree = weights.rowwise().sum();
  Eigen::VectorXd inv_sqrt(n);
  for (Index i = 0; i < n; ++i) {
    if (!(degree(i) > 0.0)) raise(ErrorCode::IsolatedVertex, "vertex " + std::to_string(i) + " has zero degree");
    inv_sqrt(i) = 1.0 / std::sqrt(degree(i));
  }
  MatrixXd lap = -(inv_sqrt.asDiagonal() * weights * inv_sqrt.asDiagonal());
  lap.diagonal().array() += 1.0;
  // Symmetrize away rounding so the eigensolver sees an exactly symmetric input.
  return 0.5 * (lap + lap.transpose());
}

SpectralEmbedding spectral_embed(const MatrixXd& laplacian, Index k, bool normalize_rows) {
  const Index n = laplacian.rows();
  if (k < 1 || k > n) raise(ErrorCode::DegenerateShape, "need 1 <= k <= N for the spectral embedding");
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(laplacian);
  if (eig.info() != Eigen::Success) raise(ErrorCode::EigensolveFailure, "symmetric eigensolver did not converge");
  SpectralEmbedding out;
  out.vectors = eig.eigenvectors().leftCols(k);
  out.values = eig.eigenvalues().head(k);
  if (normalize_rows) {
    for (Index i = 0; i < n; ++i) {
      const double norm = out.vectors.row(i).norm();
      if (norm > 0.0) out.vectors.row(i) /= norm;
    }
  }
  return out;
}

std::vector<int> canonical_labels(const std::vector<int>& labels) {
  std::vector<int> remap;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int l = labels[i];
    if (l >= static_cast<int>(remap.size())) remap.resize(static_cast<std::size_t>(l) + 1, -1);
    if (remap[l] < 0) remap[l] = *std::max_element(remap.begin(), remap.end()) + 1;
    out[i] = remap[l];
  }
  return out;
}

namespace {

struct LloydRun {
  std::vector<int> labels;
  MatrixXd centers;  // k x dims
  double inertia = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  bool ok = false;
};

MatrixXd seed_centers(const MatrixXd& points, int k, std::mt19937_64& rng) {
  const Index n = points.rows();
  MatrixXd centers(k, points.cols());
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  Index first = pick(rng);
  centers.row(0) = points.row(first);
  chosen[first] = true;
  Eigen::VectorXd closest = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = closest.sum();
    Index next = 0;
    if (total > 0.0) {
      std::discrete_distribution<Index> weighted(closest.data(), closest.data() + n);
      next = weighted(rng);
    } else {
      // Every remaining point coincides with a center; take any unused index.
      while (next < n && chosen[next]) ++next;
      if (next == n) next = pick(rng);
    }
    chosen[next] = true;
    centers.row(c) = points.row(next);
    closest = closest.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

LloydRun lloyd(const MatrixXd& points, int k, int max_iters, std::mt19937_64& rng) {
  const Index n = points.rows();
  LloydRun run;
  run.centers = seed_centers(points, k, rng);
  run.labels.assign(static_cast<std::size_t>(n), -1);
  Eigen::VectorXd dist(n);

  for (int it = 0; it <= max_iters; ++it) {
    bool changed = false;
    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - run.centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (run.labels[i] != best) changed = true;
      run.labels[i] = best;
      dist(i) = best_d;
      inertia += best_d;
    }
    run.trace.push_back(inertia);
    run.inertia = inertia;
    if (!changed && it > 0) break;

    MatrixXd sums = MatrixXd::Zero(k, points.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(run.labels[i]) += points.row(i);
      ++counts[run.labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        run.centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
        continue;
      }
      // Re-seed an empty cluster at the point farthest from its center among
      // clusters that can spare one.
      Index far = -1;
      for (Index i = 0; i < n; ++i) {
        if (counts[run.labels[i]] > 1 && dist(i) > 0.0 && (far < 0 || dist(i) > dist(far))) far = i;
      }
      if (far < 0) return run;  // ok stays false
      --counts[run.labels[far]];
      run.labels[far] = c;
      counts[c] = 1;
      dist(far) = 0.0;
      run.centers.row(c) = points.row(far);
    }
  }

  std::vector<Index> counts(static_cast<std::size_t>(k), 0);
  for (int l : run.labels) ++counts[l];
  run.ok = std::all_of(counts.begin(), counts.end(), [](Index c) { return c > 0; });
  return run;
}

}  // namespace

KMeansResult kmeans(const MatrixXd& points, int k, const KMeansOptions& options) {
  const Index n = points.rows();
  if (k < 1 || k > n) raise(ErrorCode::DegenerateShape, "k-means needs 1 <= k <= N");
  if (!points.allFinite()) raise(ErrorCode::NonFiniteInput, "k-means input contains NaN or Inf");
  std::optional<LloydRun> best;
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    auto run = lloyd(points, k, options.max_iters, rng);
    if (run.ok && (!best || run.inertia < best->inertia)) best = std::move(run);
  }
  if (!best) {
    raise(ErrorCode::EmptyClusterUnrecoverable,
          "could not populate " + std::to_string(k) + " clusters from " + std::to_string(n) + " points");
  }

  KMeansResult out;
  out.labels = canonical_labels(best->labels);
  out.inertia = best->inertia;
  out.inertia_trace = std::move(best->trace);
  out.centers.resize(points.cols(), k);
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    out.centers.col(out.labels[i]) = best->centers.row(best->labels[i]).transpose();
  }
  return out;
}

ClusterAssignment spectral_cluster(const ConsensusEmbedding& embedding, int k, const SpectralOptions& options) {
  const Index n = embedding.values.cols();
  if (k < 1 || k > n) raise(ErrorCode::DegenerateShape, "cluster count must lie in [1, N]");
  const Index neighbors = options.k_neighbors.value_or(default_k_neighbors(n));
  const auto graph = knn_similarity(embedding.values, neighbors, options.sigma);
  const auto spectral = spectral_embed(normalized_laplacian(graph.weights), k, options.normalize_rows);
  const auto km = kmeans(spectral.vectors, k, options.kmeans);

  ClusterAssignment out;
  out.labels = km.labels;
  out.global_ids = embedding.global_ids;
  if (out.global_ids.empty()) {
    for (Index i = 0; i < n; ++i) out.global_ids.push_back("s" + std::to_string(i));
  }
  out.k = k;
  return out;
}

}  // namespace mlmf
