#include "mlmf/linear_mlmf.hpp"

#include <cmath>
#include <random>

#include "mlmf/error.hpp"

namespace mlmf {

void SolverConfig::validate() const {
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) raise(ErrorCode::BadConfig, "lambda1 and lambda2 must be >= 0");
  if (max_iters < 0 || pretrain_iters < 0) raise(ErrorCode::BadConfig, "iteration counts must be >= 0");
  if (!(tol >= 0.0)) raise(ErrorCode::BadConfig, "tol must be >= 0");
  if (layer_sizes.empty()) raise(ErrorCode::BadConfig, "layer_sizes is empty");
}

std::string_view to_string(FitStatus status) noexcept {
  switch (status) {
    case FitStatus::Converged: return "converged";
    case FitStatus::MaxIterations: return "max_iterations";
    case FitStatus::StepUnderflow: return "step_underflow";
  }
  return "unknown";
}

MatrixXd select_consensus(const MatrixXd& consensus, const IndicatorMatrix& indicator, bool dense) {
  if (dense) {
    if (consensus.cols() != indicator.global_size()) raise(ErrorCode::ShapeMismatch, "consensus width");
    return consensus * indicator.dense();
  }
  if (indicator.is_identity()) {
    if (consensus.cols() != indicator.global_size()) raise(ErrorCode::ShapeMismatch, "consensus width");
    return consensus;
  }
  return indicator.select(consensus);
}

namespace {

void check_shapes(std::span<const FactorStack> stacks, const ConsensusEmbedding& consensus,
                  const MultiOmicsDataset& dataset, std::span<const IndicatorMatrix> indicators) {
  if (stacks.size() != dataset.view_count() || indicators.size() != dataset.view_count()) {
    raise(ErrorCode::ShapeMismatch, "one factor stack and one indicator per view are required");
  }
  for (std::size_t v = 0; v < stacks.size(); ++v) {
    const auto& s = stacks[v];
    const auto& x = dataset.views()[v].matrix;
    if (s.depth() == 0 || s.latents.size() != s.depth()) raise(ErrorCode::ShapeMismatch, "empty factor stack");
    if (s.bases.front().rows() != x.rows()) raise(ErrorCode::ShapeMismatch, "first basis rows differ from D_v");
    for (std::size_t i = 0; i + 1 < s.depth(); ++i) {
      if (s.bases[i].cols() != s.bases[i + 1].rows()) raise(ErrorCode::ShapeMismatch, "basis chain broken");
    }
    if (s.deepest().rows() != s.bases.back().cols() || s.deepest().cols() != x.cols()) {
      raise(ErrorCode::ShapeMismatch, "deepest latent shape");
    }
    if (indicators[v].view_size() != x.cols() || indicators[v].global_size() != dataset.size()) {
      raise(ErrorCode::ShapeMismatch, "indicator shape");
    }
    if (consensus.values.rows() != s.deepest().rows() || consensus.values.cols() != dataset.size()) {
      raise(ErrorCode::ShapeMismatch, "consensus shape");
    }
  }
}

// tr(A A^T E) with E all ones: the sum of every entry of A A^T.
double ones_trace(const MatrixXd& a) { return (a * a.transpose()).sum(); }

}  // namespace

double linear_loss(std::span<const FactorStack> stacks, const ConsensusEmbedding& consensus,
                   const MultiOmicsDataset& dataset, std::span<const IndicatorMatrix> indicators,
                   const SolverConfig& config) {
  check_shapes(stacks, consensus, dataset, indicators);
  double total = 0.0;
  for (std::size_t v = 0; v < stacks.size(); ++v) {
    const auto& s = stacks[v];
    const auto& a = s.deepest();
    total += (dataset.views()[v].matrix - s.reconstruction()).squaredNorm();
    total += config.lambda1 * ones_trace(a);
    total += config.lambda2 * (a - select_consensus(consensus.values, indicators[v], config.dense_indicators))
                                  .squaredNorm();
  }
  return total;
}

MatrixXd update_basis(const FactorStack& stack, std::size_t layer, const MatrixXd& view_matrix) {
  if (layer >= stack.depth()) raise(ErrorCode::ShapeMismatch, "layer index out of range");
  const MatrixXd rest = stack.basis_product(layer + 1, stack.depth()) * stack.deepest();
  if (layer == 0) return view_matrix * pseudo_inverse(rest);
  const MatrixXd prefix = stack.basis_product(0, layer);
  if (prefix.rows() != view_matrix.rows()) raise(ErrorCode::ShapeMismatch, "basis prefix rows differ from D_v");
  return pseudo_inverse(prefix) * view_matrix * pseudo_inverse(rest);
}

MatrixXd update_deepest(const FactorStack& stack, const MatrixXd& view_matrix, const ConsensusEmbedding& consensus,
                        const IndicatorMatrix& indicator, const SolverConfig& config) {
  const MatrixXd psi = stack.basis_product(0, stack.depth());
  if (psi.rows() != view_matrix.rows()) raise(ErrorCode::ShapeMismatch, "basis product rows differ from D_v");
  const Index d = psi.cols();
  const MatrixXd b = psi.transpose() * view_matrix +
                     config.lambda2 * select_consensus(consensus.values, indicator, config.dense_indicators);
  const MatrixXd c = psi.transpose() * psi + config.lambda1 * MatrixXd::Ones(d, d) +
                     config.lambda2 * MatrixXd::Identity(d, d);
  return multiplicative_update(stack.deepest(), b, c);
}

MatrixXd update_intermediate(const FactorStack& stack, std::size_t layer, const MatrixXd& view_matrix) {
  if (layer + 1 >= stack.depth()) raise(ErrorCode::ShapeMismatch, "intermediate layer index out of range");
  const MatrixXd psi = stack.basis_product(0, layer + 1);
  if (psi.rows() != view_matrix.rows()) raise(ErrorCode::ShapeMismatch, "basis product rows differ from D_v");
  return multiplicative_update(stack.latents[layer], psi.transpose() * view_matrix, psi.transpose() * psi);
}

MatrixXd update_consensus(std::span<const FactorStack> stacks, std::span<const IndicatorMatrix> indicators,
                          bool dense) {
  if (stacks.empty() || stacks.size() != indicators.size()) {
    raise(ErrorCode::ShapeMismatch, "one indicator per factor stack is required");
  }
  const Index n = indicators.front().global_size();
  const Index d = stacks.front().deepest().rows();
  MatrixXd numer = MatrixXd::Zero(d, n);
  for (std::size_t v = 0; v < stacks.size(); ++v) {
    const auto& a = stacks[v].deepest();
    if (a.rows() != d || indicators[v].global_size() != n) raise(ErrorCode::ShapeMismatch, "consensus inputs");
    numer += dense ? MatrixXd(a * indicators[v].dense().transpose()) : indicators[v].scatter(a);
  }

  if (dense) {
    MatrixXd normal = MatrixXd::Zero(n, n);
    for (const auto& g : indicators) {
      const MatrixXd gd = g.dense();
      normal += gd * gd.transpose();
    }
    for (Index i = 0; i < n; ++i) {
      if (normal(i, i) <= 0.0) raise(ErrorCode::SingularNormalMatrix, "sample " + std::to_string(i) + " in no view");
    }
    Eigen::LDLT<MatrixXd> ldlt(normal);
    return ldlt.solve(numer.transpose()).transpose();
  }

  Eigen::VectorXd count = Eigen::VectorXd::Zero(n);
  for (const auto& g : indicators) {
    for (Index p : g.positions()) count(p) += 1.0;
  }
  for (Index i = 0; i < n; ++i) {
    if (count(i) <= 0.0) raise(ErrorCode::SingularNormalMatrix, "sample " + std::to_string(i) + " in no view");
    numer.col(i) /= count(i);
  }
  return numer;
}

void linear_sweep(std::vector<FactorStack>& stacks, ConsensusEmbedding& consensus, const MultiOmicsDataset& dataset,
                  std::span<const IndicatorMatrix> indicators, const SolverConfig& config) {
  for (std::size_t v = 0; v < stacks.size(); ++v) {
    auto& s = stacks[v];
    const auto& x = dataset.views()[v].matrix;
    for (std::size_t i = 0; i < s.depth(); ++i) {
      s.bases[i] = update_basis(s, i, x);
      if (i + 1 < s.depth()) {
        s.latents[i] = update_intermediate(s, i, x);
      } else {
        s.latents[i] = update_deepest(s, x, consensus, indicators[v], config);
      }
    }
  }
  consensus.values = update_consensus(stacks, indicators, config.dense_indicators);
}

void align_latent_frames(std::vector<FactorStack>& stacks, std::span<const IndicatorMatrix> indicators,
                         const MultiOmicsDataset& dataset) {
  if (stacks.size() != indicators.size() || stacks.size() != dataset.view_count()) {
    raise(ErrorCode::ShapeMismatch, "one indicator per factor stack is required");
  }
  std::size_t ref = 0;
  for (std::size_t v = 1; v < stacks.size(); ++v) {
    if (indicators[v].view_size() > indicators[ref].view_size()) ref = v;
  }
  std::vector<Index> ref_col(static_cast<std::size_t>(dataset.size()), -1);
  const auto& ref_pos = indicators[ref].positions();
  for (std::size_t j = 0; j < ref_pos.size(); ++j) ref_col[static_cast<std::size_t>(ref_pos[j])] = static_cast<Index>(j);

  for (std::size_t v = 0; v < stacks.size(); ++v) {
    if (v == ref) continue;
    auto& s = stacks[v];
    const Index d = s.deepest().rows();
    std::vector<std::pair<Index, Index>> shared;  // (ref column, view column)
    const auto& pos = indicators[v].positions();
    for (std::size_t j = 0; j < pos.size(); ++j) {
      const Index r = ref_col[static_cast<std::size_t>(pos[j])];
      if (r >= 0) shared.emplace_back(r, static_cast<Index>(j));
    }
    if (static_cast<Index>(shared.size()) < d) continue;
    MatrixXd target(d, static_cast<Index>(shared.size()));
    MatrixXd source(d, static_cast<Index>(shared.size()));
    for (std::size_t k = 0; k < shared.size(); ++k) {
      target.col(static_cast<Index>(k)) = stacks[ref].deepest().col(shared[k].first);
      source.col(static_cast<Index>(k)) = s.deepest().col(shared[k].second);
    }
    const MatrixXd t = target * pseudo_inverse(source);
    s.deepest() = (t * s.deepest()).cwiseMax(kInitFloor);
    s.bases.back() = update_basis(s, s.depth() - 1, dataset.views()[v].matrix);
  }
}

void initialize_factors(const MultiOmicsDataset& dataset, std::span<const IndicatorMatrix> indicators,
                        const SolverConfig& config, std::vector<FactorStack>& stacks, ConsensusEmbedding& consensus) {
  stacks.clear();
  SemiNmfOptions pre{config.pretrain_iters, config.tol, config.seed};
  for (const auto& view : dataset.views()) {
    check_layer_sizes(config.layer_sizes, view.features(), view.samples());
    stacks.push_back(pretrain_stack(view.matrix, config.layer_sizes, pre, view.name));
  }
  consensus.global_ids = dataset.global_ids();
  if (config.random_consensus_init) {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    consensus.values.resize(config.layer_sizes.back(), dataset.size());
    for (Index j = 0; j < consensus.values.cols(); ++j) {
      for (Index i = 0; i < consensus.values.rows(); ++i) consensus.values(i, j) = unit(rng);
    }
  } else {
    if (config.align_views) align_latent_frames(stacks, indicators, dataset);
    consensus.values = update_consensus(stacks, indicators, config.dense_indicators);
  }
}

FitResult fit_linear(const MultiOmicsDataset& dataset, const SolverConfig& config) {
  config.validate();
  std::vector<FactorStack> stacks;
  ConsensusEmbedding consensus;
  initialize_factors(dataset, dataset.indicators(), config, stacks, consensus);
  return refine_linear(dataset, config, std::move(stacks), std::move(consensus));
}

FitResult refine_linear(const MultiOmicsDataset& dataset, const SolverConfig& config, std::vector<FactorStack> stacks,
                        ConsensusEmbedding consensus) {
  config.validate();
  const auto indicators = dataset.indicators();
  FitResult result;
  result.stacks = std::move(stacks);
  result.consensus = std::move(consensus);

  double loss = linear_loss(result.stacks, result.consensus, dataset, indicators, config);
  result.loss_trace.push_back(loss);
  result.status = FitStatus::MaxIterations;
  for (int it = 0; it < config.max_iters; ++it) {
    linear_sweep(result.stacks, result.consensus, dataset, indicators, config);
    const double next = linear_loss(result.stacks, result.consensus, dataset, indicators, config);
    if (!std::isfinite(next)) raise(ErrorCode::NonFiniteInput, "linear objective became non-finite");
    result.loss_trace.push_back(next);
    result.iterations = it + 1;
    const bool done = loss <= 0.0 || std::abs(loss - next) / loss < config.tol;
    loss = next;
    if (done) {
      result.status = FitStatus::Converged;
      break;
    }
  }
  return result;
}

}  // namespace mlmf
