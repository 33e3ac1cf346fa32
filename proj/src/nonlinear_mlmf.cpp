#include "mlmf/nonlinear_mlmf.hpp"

#include <cmath>

#include "mlmf/error.hpp"

namespace mlmf {

std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Softplus: return "softplus";
    case Activation::Relu: return "relu";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "softplus") return Activation::Softplus;
  if (name == "relu") return Activation::Relu;
  raise(ErrorCode::BadConfig, "unknown activation '" + std::string(name) + "'");
}

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace

MatrixXd activate(Activation a, const MatrixXd& pre) {
  switch (a) {
    case Activation::Sigmoid: return pre.unaryExpr(&sigmoid);
    case Activation::Softplus: return pre.unaryExpr(&softplus);
    case Activation::Relu: return pre.cwiseMax(0.0);
  }
  return pre;
}

MatrixXd activate_derivative(Activation a, const MatrixXd& pre) {
  switch (a) {
    case Activation::Sigmoid:
      return pre.unaryExpr([](double x) {
        const double s = sigmoid(x);
        return s * (1.0 - s);
      });
    case Activation::Softplus: return pre.unaryExpr(&sigmoid);
    case Activation::Relu: return pre.unaryExpr([](double x) { return x > 0.0 ? 1.0 : 0.0; });
  }
  return pre;
}

void NonlinearSolverConfig::validate() const {
  SolverConfig::validate();
  if (!(alpha0 > 0.0)) raise(ErrorCode::BadConfig, "alpha0 must be > 0");
  if (!(backtrack > 0.0 && backtrack < 1.0)) raise(ErrorCode::BadConfig, "backtrack factor must lie in (0, 1)");
  if (!(min_step > 0.0)) raise(ErrorCode::BadConfig, "min_step must be > 0");
  if (!(grow >= 1.0)) raise(ErrorCode::BadConfig, "step growth must be >= 1");
}

void forward_pass(FactorStack& stack, Activation activation) {
  for (std::size_t i = stack.depth() - 1; i >= 1; --i) {
    stack.latents[i - 1] = activate(activation, stack.bases[i] * stack.latents[i]);
  }
}

MatrixXd nonlinear_reconstruction(const FactorStack& stack, Activation activation) {
  MatrixXd inner = stack.deepest();
  for (std::size_t i = stack.depth() - 1; i >= 1; --i) inner = activate(activation, stack.bases[i] * inner);
  return stack.bases.front() * inner;
}

double nonlinear_loss(std::span<const FactorStack> stacks, const ConsensusEmbedding& consensus,
                      const MultiOmicsDataset& dataset, std::span<const IndicatorMatrix> indicators,
                      const NonlinearSolverConfig& config) {
  if (stacks.size() != dataset.view_count() || indicators.size() != dataset.view_count()) {
    raise(ErrorCode::ShapeMismatch, "one factor stack and one indicator per view are required");
  }
  double total = 0.0;
  for (std::size_t v = 0; v < stacks.size(); ++v) {
    const auto& s = stacks[v];
    const auto& x = dataset.views()[v].matrix;
    const auto& a = s.deepest();
    if (a.cols() != x.cols() || s.bases.front().rows() != x.rows() || consensus.values.rows() != a.rows()) {
      raise(ErrorCode::ShapeMismatch, "factor stack does not match view '" + s.view_name + "'");
    }
    total += (x - nonlinear_reconstruction(s, config.activation)).squaredNorm();
    total += config.lambda1 * (a * a.transpose()).sum();
    total += config.lambda2 * (a - select_consensus(consensus.values, indicators[v], config.dense_indicators))
                                  .squaredNorm();
  }
  return total;
}

GradientSet gradients(std::span<const FactorStack> stacks, const ConsensusEmbedding& consensus,
                      const MultiOmicsDataset& dataset, std::span<const IndicatorMatrix> indicators,
                      const NonlinearSolverConfig& config) {
  if (stacks.size() != dataset.view_count() || indicators.size() != dataset.view_count()) {
    raise(ErrorCode::ShapeMismatch, "one factor stack and one indicator per view are required");
  }
  GradientSet out;
  out.consensus = MatrixXd::Zero(consensus.values.rows(), consensus.values.cols());
  for (std::size_t v = 0; v < stacks.size(); ++v) {
    const auto& s = stacks[v];
    const auto& x = dataset.views()[v].matrix;
    const std::size_t m = s.depth();

    // Forward: inputs[i] feeds basis i; pre[i] = Z_i inputs[i] for i >= 1.
    std::vector<MatrixXd> inputs(m);
    std::vector<MatrixXd> pre(m);
    inputs[m - 1] = s.deepest();
    for (std::size_t i = m - 1; i >= 1; --i) {
      pre[i] = s.bases[i] * inputs[i];
      inputs[i - 1] = activate(config.activation, pre[i]);
    }

    NonlinearGradient g;
    g.bases.resize(m);
    const MatrixXd residual = s.bases[0] * inputs[0] - x;
    g.bases[0] = 2.0 * residual * inputs[0].transpose();
    MatrixXd upstream = 2.0 * s.bases[0].transpose() * residual;  // dL/d inputs[0]
    for (std::size_t i = 1; i < m; ++i) {
      const MatrixXd d_pre = upstream.cwiseProduct(activate_derivative(config.activation, pre[i]));
      g.bases[i] = d_pre * inputs[i].transpose();
      upstream = s.bases[i].transpose() * d_pre;
    }

    const auto& a = s.deepest();
    const MatrixXd gap = a - select_consensus(consensus.values, indicators[v], config.dense_indicators);
    // E a: every row holds the column sums of a
    const MatrixXd ea = a.colwise().sum().replicate(a.rows(), 1);
    g.deepest = upstream + 2.0 * config.lambda1 * ea + 2.0 * config.lambda2 * gap;
    if (config.dense_indicators) {
      out.consensus -= 2.0 * config.lambda2 * gap * indicators[v].dense().transpose();
    } else {
      out.consensus -= 2.0 * config.lambda2 * indicators[v].scatter(gap);
    }

    bool finite = g.deepest.allFinite();
    for (const auto& b : g.bases) finite = finite && b.allFinite();
    if (!finite) raise(ErrorCode::NonFiniteGradient, "gradient overflow in view '" + s.view_name + "'");
    out.views.push_back(std::move(g));
  }
  if (!out.consensus.allFinite()) raise(ErrorCode::NonFiniteGradient, "consensus gradient overflow");
  return out;
}

namespace {

double squared_norm(const GradientSet& g) {
  double total = g.consensus.squaredNorm();
  for (const auto& v : g.views) {
    total += v.deepest.squaredNorm();
    for (const auto& b : v.bases) total += b.squaredNorm();
  }
  return total;
}

}  // namespace

FitResult refine_nonlinear(const MultiOmicsDataset& dataset, const NonlinearSolverConfig& config,
                           std::vector<FactorStack> stacks, ConsensusEmbedding consensus) {
  config.validate();
  const auto indicators = dataset.indicators();
  FitResult result;
  result.stacks = std::move(stacks);
  result.consensus = std::move(consensus);
  for (auto& s : result.stacks) forward_pass(s, config.activation);

  double loss = nonlinear_loss(result.stacks, result.consensus, dataset, indicators, config);
  if (!std::isfinite(loss)) raise(ErrorCode::NonFiniteGradient, "initial nonlinear objective is not finite");
  result.loss_trace.push_back(loss);
  result.status = FitStatus::MaxIterations;

  double step = config.alpha0;
  for (int it = 0; it < config.max_iters; ++it) {
    const auto grad = gradients(result.stacks, result.consensus, dataset, indicators, config);
    if (loss <= 0.0 || squared_norm(grad) == 0.0) {
      result.status = FitStatus::Converged;
      break;
    }

    bool accepted = false;
    double trial_loss = loss;
    std::vector<FactorStack> trial;
    ConsensusEmbedding trial_consensus;
    while (step >= config.min_step) {
      trial = result.stacks;
      for (std::size_t v = 0; v < trial.size(); ++v) {
        auto& s = trial[v];
        for (std::size_t i = 0; i < s.depth(); ++i) s.bases[i] -= step * grad.views[v].bases[i];
        s.deepest() = (s.deepest() - step * grad.views[v].deepest).cwiseMax(0.0);
        forward_pass(s, config.activation);
      }
      trial_consensus.global_ids = result.consensus.global_ids;
      trial_consensus.values = result.consensus.values - step * grad.consensus;
      trial_loss = nonlinear_loss(trial, trial_consensus, dataset, indicators, config);
      if (std::isfinite(trial_loss) && trial_loss < loss) {
        accepted = true;
        break;
      }
      step *= config.backtrack;
    }
    if (!accepted) {
      result.status = FitStatus::StepUnderflow;
      result.warnings.push_back("StepUnderflow: no descent with step >= " + format_double(config.min_step) +
                                " after " + std::to_string(it) + " accepted steps");
      break;
    }

    result.stacks = std::move(trial);
    result.consensus = std::move(trial_consensus);
    result.loss_trace.push_back(trial_loss);
    result.iterations = it + 1;
    const bool done = std::abs(loss - trial_loss) / loss < config.tol;
    loss = trial_loss;
    if (done) {
      result.status = FitStatus::Converged;
      break;
    }
    step *= config.grow;
  }
  return result;
}

FitResult fit_nonlinear(const MultiOmicsDataset& dataset, const NonlinearSolverConfig& config) {
  config.validate();
  const auto indicators = dataset.indicators();
  std::vector<FactorStack> stacks;
  ConsensusEmbedding consensus;
  initialize_factors(dataset, indicators, config, stacks, consensus);
  for (std::size_t v = 0; v < stacks.size(); ++v) {
    auto& s = stacks[v];
    forward_pass(s, config.activation);
    // Squashed inner layers are close to low rank; a tight cutoff would
    // invert their noise floor and blow up the outer basis.
    s.bases.front() = dataset.views()[v].matrix * pseudo_inverse(s.latents.front(), kRefitRelativeTolerance);
  }
  return refine_nonlinear(dataset, config, std::move(stacks), std::move(consensus));
}

}  // namespace mlmf
