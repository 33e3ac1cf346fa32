#pragma once

// Nonlinear multi-layer factorization
//
//   X_v ~ Z_1 f(Z_2 f( ... f(Z_m H_m)))
//
// with the same sparsity and consensus penalties as the linear model, fitted
// by projected gradient descent with a backtracking step size shared by all
// parameters. Intermediate latents are outputs of the forward pass, not free
// parameters.

#include <string_view>
#include <vector>

#include "mlmf/linear_mlmf.hpp"

namespace mlmf {

/// Singular-value cutoff (relative) for the outer-basis refit after pretraining.
inline constexpr double kRefitRelativeTolerance = 1e-3;

enum class Activation { Sigmoid, Softplus, Relu };

std::string_view to_string(Activation a) noexcept;
Activation parse_activation(std::string_view name);

/// Entrywise f and f'. All three are nonnegative; relu uses 0 as its
/// derivative at 0.
MatrixXd activate(Activation a, const MatrixXd& pre);
MatrixXd activate_derivative(Activation a, const MatrixXd& pre);

struct NonlinearSolverConfig : SolverConfig {
  Activation activation = Activation::Sigmoid;
  double alpha0 = 1e-2;    // initial step size
  double backtrack = 0.5;  // step shrink factor on a failed step
  double min_step = 1e-10;
  /// Step growth after an accepted step (1 keeps the step fixed).
  double grow = 2.0;

  void validate() const;
};

/// Free parameters of one view's nonlinear stack.
struct NonlinearGradient {
  std::vector<MatrixXd> bases;  // dL/dZ_i
  MatrixXd deepest;             // dL/dH_m
};

struct GradientSet {
  std::vector<NonlinearGradient> views;
  MatrixXd consensus;  // dL/dH
};

/// Recomputes H_{i-1} = f(Z_i H_i) for i = m..2 from the current bases and deepest latent.
void forward_pass(FactorStack& stack, Activation activation);

/// Z_1 f(Z_2 f(... f(Z_m H_m))) without touching the stored intermediates.
MatrixXd nonlinear_reconstruction(const FactorStack& stack, Activation activation);

double nonlinear_loss(std::span<const FactorStack> stacks, const ConsensusEmbedding& consensus,
                      const MultiOmicsDataset& dataset, std::span<const IndicatorMatrix> indicators,
                      const NonlinearSolverConfig& config);

/// Analytic gradient of nonlinear_loss with respect to every Z_i, H_m and H.
GradientSet gradients(std::span<const FactorStack> stacks, const ConsensusEmbedding& consensus,
                      const MultiOmicsDataset& dataset, std::span<const IndicatorMatrix> indicators,
                      const NonlinearSolverConfig& config);

/// Projected gradient descent from the given starting point. Stops on a
/// relative loss change below tol, after max_iters accepted steps, or when
/// backtracking shrinks the step below min_step (status StepUnderflow; the
/// best point found is returned).
FitResult refine_nonlinear(const MultiOmicsDataset& dataset, const NonlinearSolverConfig& config,
                           std::vector<FactorStack> stacks, ConsensusEmbedding consensus);

/// Layer-wise Semi-NMF pretraining, a least-squares refit of each outer basis
/// against the activated inner layers, then refine_nonlinear.
FitResult fit_nonlinear(const MultiOmicsDataset& dataset, const NonlinearSolverConfig& config);

}  // namespace mlmf
