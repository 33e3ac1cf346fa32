#pragma once

// Linear multi-layer factorization with a shared consensus embedding:
//
//   sum_v ||X_v - Z_1 ... Z_m H_m||^2 + lambda1 tr(H_m H_m^T E)
//         + lambda2 ||H_m - H G_v||^2,          H_m >= 0
//
// solved by alternating closed-form basis updates, multiplicative latent
// updates and the closed-form consensus update.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlmf/data_model.hpp"
#include "mlmf/semi_nmf.hpp"

namespace mlmf {

struct SolverConfig {
  double lambda1 = 1.0;  // sparsity weight
  double lambda2 = 1.0;  // consensus weight
  std::vector<Index> layer_sizes{32, 8};
  int max_iters = 500;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  /// Start the consensus from uniform noise instead of the pretrained latents.
  bool random_consensus_init = false;
  /// Multiply by the dense indicator matrices even when a view is full.
  bool dense_indicators = false;
  /// Sweeps used by each layer-wise Semi-NMF during pretraining.
  int pretrain_iters = 500;
  /// Map every view's pretrained deepest latent into the frame of the
  /// best-covered view before the consensus is first formed.
  bool align_views = true;

  void validate() const;
};

struct ConsensusEmbedding {
  MatrixXd values;  // d x N
  std::vector<std::string> global_ids;
};

enum class FitStatus { Converged, MaxIterations, StepUnderflow };

std::string_view to_string(FitStatus status) noexcept;

struct FitResult {
  std::vector<FactorStack> stacks;
  ConsensusEmbedding consensus;
  std::vector<double> loss_trace;  // entry 0 is the initialized point
  int iterations = 0;
  FitStatus status = FitStatus::MaxIterations;
  std::vector<std::string> warnings;
};

/// H * G for one view, gathering columns or multiplying the dense selector.
MatrixXd select_consensus(const MatrixXd& consensus, const IndicatorMatrix& indicator, bool dense);

double linear_loss(std::span<const FactorStack> stacks, const ConsensusEmbedding& consensus,
                   const MultiOmicsDataset& dataset, std::span<const IndicatorMatrix> indicators,
                   const SolverConfig& config);

/// Z_i = pinv(Z_1..Z_{i-1}) X pinv(Z_{i+1}..Z_m H_m), layer is 0-based.
MatrixXd update_basis(const FactorStack& stack, std::size_t layer, const MatrixXd& view_matrix);

/// Multiplicative update of the deepest latent with
///   B = Psi^T X + lambda2 H G,  C = Psi^T Psi + lambda1 E + lambda2 I.
MatrixXd update_deepest(const FactorStack& stack, const MatrixXd& view_matrix, const ConsensusEmbedding& consensus,
                        const IndicatorMatrix& indicator, const SolverConfig& config);

/// Multiplicative update of an intermediate latent H_i (layer < m-1, 0-based)
/// against ||X - Psi H_i||, Psi = Z_1 ... Z_i.
MatrixXd update_intermediate(const FactorStack& stack, std::size_t layer, const MatrixXd& view_matrix);

/// Exact minimizer of sum_v ||H_m^(v) - H G_v||^2:
///   H = (sum_v H_m^(v) G_v^T) (sum_v G_v G_v^T)^{-1}.
MatrixXd update_consensus(std::span<const FactorStack> stacks, std::span<const IndicatorMatrix> indicators,
                          bool dense = false);

/// Runs one full sweep: every view's layers (basis, then latent), then the consensus.
void linear_sweep(std::vector<FactorStack>& stacks, ConsensusEmbedding& consensus, const MultiOmicsDataset& dataset,
                  std::span<const IndicatorMatrix> indicators, const SolverConfig& config);

/// Independently pretrained views order and mix their latent factors
/// differently. For each view v other than the reference r (most samples),
/// fits T = H_r pinv(H_v) on the shared samples, replaces H_v by
/// max(T H_v, 1e-6) and refits the last basis by least squares. Views sharing
/// fewer samples than latent rows are left alone.
void align_latent_frames(std::vector<FactorStack>& stacks, std::span<const IndicatorMatrix> indicators,
                         const MultiOmicsDataset& dataset);

/// Pretrains one stack per view and initializes the consensus.
void initialize_factors(const MultiOmicsDataset& dataset, std::span<const IndicatorMatrix> indicators,
                        const SolverConfig& config, std::vector<FactorStack>& stacks, ConsensusEmbedding& consensus);

/// Sweeps from the given starting point until convergence or max_iters.
FitResult refine_linear(const MultiOmicsDataset& dataset, const SolverConfig& config, std::vector<FactorStack> stacks,
                        ConsensusEmbedding consensus);

FitResult fit_linear(const MultiOmicsDataset& dataset, const SolverConfig& config);

}  // namespace mlmf
