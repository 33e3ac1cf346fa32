#include "mlmf/semi_nmf.hpp"

#include <algorithm>
#include <cmath>

#include "mlmf/error.hpp"

namespace mlmf {

MatrixXd pseudo_inverse(const MatrixXd& m, double relative_tolerance) {
  if (m.size() == 0) return MatrixXd::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cutoff = relative_tolerance * (s.size() > 0 ? s(0) : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

MatrixXd multiplicative_update(const MatrixXd& a, const MatrixXd& b, const MatrixXd& c) {
  const MatrixXd c_pos = positive_part(c);
  const MatrixXd c_neg = negative_part(c);
  const MatrixXd numer = positive_part(b) + c_neg * a;
  const MatrixXd denom = negative_part(b) + c_pos * a;
  return a.array() * (numer.array() / denom.array().max(kDenominatorFloor)).sqrt();
}

namespace {

double residual(const MatrixXd& x, const MatrixXd& basis, const MatrixXd& coeffs) {
  return (x - basis * coeffs).norm();
}

bool converged(double previous, double current, double tol) {
  if (previous <= 0.0) return true;
  return std::abs(previous - current) / previous < tol;
}

}  // namespace

SemiNmfResult semi_nmf(const MatrixXd& matrix, Index rank, const SemiNmfOptions& options) {
  if (!matrix.allFinite()) raise(ErrorCode::NonFiniteInput, "semi_nmf input contains NaN or Inf");
  if (rank < 1 || rank > std::min(matrix.rows(), matrix.cols())) {
    raise(ErrorCode::RankTooLarge, "rank " + std::to_string(rank) + " for a " + std::to_string(matrix.rows()) +
                                       "x" + std::to_string(matrix.cols()) + " matrix");
  }

  // Start from the rank-k truncated SVD. Each singular pair is oriented so
  // that the right vector has nonnegative sum, then coefficients are clipped
  // to a small positive floor (a zero coefficient is a fixed point of the
  // multiplicative rule).
  Eigen::JacobiSVD<MatrixXd> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  MatrixXd u = svd.matrixU().leftCols(rank);
  MatrixXd v = svd.matrixV().leftCols(rank);
  for (Index j = 0; j < rank; ++j) {
    if (v.col(j).sum() < 0.0) {
      u.col(j) *= -1.0;
      v.col(j) *= -1.0;
    }
  }
  SemiNmfResult result;
  auto& f = result.factors;
  f.basis = u * svd.singularValues().head(rank).asDiagonal();
  f.coefficients = v.transpose().cwiseMax(kInitFloor);

  double loss = residual(matrix, f.basis, f.coefficients);
  result.loss_trace.push_back(loss);
  if (loss == 0.0) return result;

  for (int it = 0; it < options.max_iters; ++it) {
    f.basis = matrix * pseudo_inverse(f.coefficients);
    f.coefficients = multiplicative_update(f.coefficients, f.basis.transpose() * matrix,
                                           f.basis.transpose() * f.basis);
    const double next = residual(matrix, f.basis, f.coefficients);
    result.loss_trace.push_back(next);
    result.iterations = it + 1;
    const bool done = converged(loss, next, options.tol);
    loss = next;
    if (done) break;
  }
  return result;
}

MatrixXd FactorStack::basis_product(std::size_t first, std::size_t last) const {
  if (first >= last) {
    const Index n = first < bases.size() ? bases[first].rows() : bases.back().cols();
    return MatrixXd::Identity(n, n);
  }
  MatrixXd out = bases[first];
  for (std::size_t i = first + 1; i < last; ++i) out = out * bases[i];
  return out;
}

MatrixXd FactorStack::reconstruction() const { return basis_product(0, depth()) * deepest(); }

void check_layer_sizes(const std::vector<Index>& layer_sizes, Index rows, Index cols) {
  if (layer_sizes.empty()) raise(ErrorCode::NonDecreasingLayers, "at least one layer size is required");
  for (std::size_t i = 1; i < layer_sizes.size(); ++i) {
    if (layer_sizes[i] >= layer_sizes[i - 1]) {
      raise(ErrorCode::NonDecreasingLayers, "layer sizes must be strictly decreasing");
    }
  }
  if (layer_sizes.back() < 1) raise(ErrorCode::RankTooLarge, "layer sizes must be positive");
  if (layer_sizes.front() > std::min(rows, cols)) {
    raise(ErrorCode::RankTooLarge, "first layer size " + std::to_string(layer_sizes.front()) +
                                       " exceeds min(" + std::to_string(rows) + ", " + std::to_string(cols) + ")");
  }
}

FactorStack pretrain_stack(const MatrixXd& matrix, const std::vector<Index>& layer_sizes,
                           const SemiNmfOptions& options, std::string view_name) {
  check_layer_sizes(layer_sizes, matrix.rows(), matrix.cols());
  FactorStack stack;
  stack.view_name = std::move(view_name);
  const MatrixXd* input = &matrix;
  for (std::size_t i = 0; i < layer_sizes.size(); ++i) {
    auto layer = semi_nmf(*input, layer_sizes[i], options);
    if (i + 1 < layer_sizes.size()) {
      // Unit basis columns put the scale into the coefficient rows, so the
      // next layer sees strong components as strong instead of every row of
      // V^T carrying the same weight.
      auto& f = layer.factors;
      for (Index k = 0; k < f.basis.cols(); ++k) {
        const double n = f.basis.col(k).norm();
        if (n > 0.0) {
          f.basis.col(k) /= n;
          f.coefficients.row(k) *= n;
        }
      }
    }
    stack.bases.push_back(std::move(layer.factors.basis));
    stack.latents.push_back(std::move(layer.factors.coefficients));
    input = &stack.latents.back();
  }
  return stack;
}

}  // namespace mlmf
