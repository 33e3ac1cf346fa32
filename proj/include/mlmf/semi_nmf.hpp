#pragma once

// Single-layer Semi-NMF, X ~ basis * coefficients with coefficients >= 0,
// and greedy layer-wise pretraining of deep factor stacks.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mlmf {

using Eigen::Index;
using Eigen::MatrixXd;

inline constexpr double kDenominatorFloor = 1e-12;
inline constexpr double kInitFloor = 1e-6;
inline constexpr double kPinvRelativeTolerance = 1e-10;

/// Entrywise nonnegative parts: M = pos(M) - neg(M), pos = (|M|+M)/2, neg = (|M|-M)/2.
inline MatrixXd positive_part(const MatrixXd& m) { return (m.array().abs() + m.array()) * 0.5; }
inline MatrixXd negative_part(const MatrixXd& m) { return (m.array().abs() - m.array()) * 0.5; }

/// Moore-Penrose pseudo-inverse; singular values below 1e-10 * sigma_max count as zero.
MatrixXd pseudo_inverse(const MatrixXd& m, double relative_tolerance = kPinvRelativeTolerance);

/// One multiplicative step for min_A tr(A^T C A) - 2 tr(B^T A) with A >= 0 and
/// C symmetric:  A <- A .* sqrt((B+ + C- A) / (B- + C+ A)).
/// Preserves nonnegativity exactly; denominators are floored at 1e-12.
MatrixXd multiplicative_update(const MatrixXd& a, const MatrixXd& b, const MatrixXd& c);

struct SemiNmfFactors {
  MatrixXd basis;         // D x k, any sign
  MatrixXd coefficients;  // k x N, >= 0
};

struct SemiNmfOptions {
  int max_iters = 500;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

struct SemiNmfResult {
  SemiNmfFactors factors;
  std::vector<double> loss_trace;  // Frobenius residual; entry 0 is the initial point
  int iterations = 0;
};

/// SVD-initialized Semi-NMF: alternates the least-squares basis update with
/// the multiplicative coefficient update until the relative change of the
/// residual drops below `tol` or `max_iters` sweeps have run.
SemiNmfResult semi_nmf(const MatrixXd& matrix, Index rank, const SemiNmfOptions& options = {});

/// Factors of a deep linear model X ~ Z_1 Z_2 ... Z_m H_m, with the
/// intermediate latents H_i ~ Z_{i+1} ... Z_m H_m kept alongside.
struct FactorStack {
  std::string view_name;
  std::vector<MatrixXd> bases;    // Z_i : d_{i-1} x d_i, d_0 = D_v
  std::vector<MatrixXd> latents;  // H_i : d_i x N_v, >= 0

  std::size_t depth() const { return bases.size(); }
  const MatrixXd& deepest() const { return latents.back(); }
  MatrixXd& deepest() { return latents.back(); }

  /// Z_first * ... * Z_{last-1} (0-based, half open). Identity of size
  /// rows(Z_first) when the range is empty.
  MatrixXd basis_product(std::size_t first, std::size_t last) const;
  /// Z_1 ... Z_m H_m
  MatrixXd reconstruction() const;
};

/// Greedy layer-wise pretraining: semi_nmf(X, d_1) -> (Z_1, H_1), then
/// semi_nmf(H_1, d_2) -> (Z_2, H_2), and so on.
FactorStack pretrain_stack(const MatrixXd& matrix, const std::vector<Index>& layer_sizes,
                           const SemiNmfOptions& options = {}, std::string view_name = {});

/// Throws NonDecreasingLayers / RankTooLarge when the sizes cannot factor a
/// D x N matrix.
void check_layer_sizes(const std::vector<Index>& layer_sizes, Index rows, Index cols);

}  // namespace mlmf
