#include <doctest.h>

#include <cmath>
#include <functional>

#include "mlmf/error.hpp"
#include "mlmf/nonlinear_mlmf.hpp"
#include "test_support.hpp"

using namespace mlmf;
using testing_support::gaussian;
using testing_support::uniform;

namespace {

double scalar_act(Activation a, double x) {
  switch (a) {
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::Softplus: return std::log(1.0 + std::exp(x));
    case Activation::Relu: return x > 0.0 ? x : 0.0;
  }
  return x;
}

MatrixXd loop_product(const MatrixXd& z, const MatrixXd& r) {
  MatrixXd out = MatrixXd::Zero(z.rows(), r.cols());
  for (Index a = 0; a < z.rows(); ++a)
    for (Index b = 0; b < r.cols(); ++b)
      for (Index c = 0; c < z.cols(); ++c) out(a, b) += z(a, c) * r(c, b);
  return out;
}

double scalar_loss(const std::vector<FactorStack>& stacks, const MatrixXd& h, const MultiOmicsDataset& ds,
                   const std::vector<IndicatorMatrix>& g, const NonlinearSolverConfig& cfg) {
  double total = 0.0;
  for (std::size_t v = 0; v < stacks.size(); ++v) {
    const auto& s = stacks[v];
    MatrixXd r = s.deepest();
    for (std::size_t i = s.depth(); i-- > 1;) {
      r = loop_product(s.bases[i], r);
      for (Index a = 0; a < r.rows(); ++a)
        for (Index b = 0; b < r.cols(); ++b) r(a, b) = scalar_act(cfg.activation, r(a, b));
    }
    r = loop_product(s.bases[0], r);
    const auto& x = ds.views()[v].matrix;
    for (Index a = 0; a < x.rows(); ++a)
      for (Index b = 0; b < x.cols(); ++b) total += (x(a, b) - r(a, b)) * (x(a, b) - r(a, b));
    const auto& hm = s.deepest();
    for (Index b = 0; b < hm.cols(); ++b) {
      double col = 0.0;
      for (Index a = 0; a < hm.rows(); ++a) col += hm(a, b);
      total += cfg.lambda1 * col * col;
    }
    const auto& pos = g[v].positions();
    for (Index a = 0; a < hm.rows(); ++a)
      for (Index b = 0; b < hm.cols(); ++b) total += cfg.lambda2 * std::pow(hm(a, b) - h(a, pos[b]), 2);
  }
  return total;
}

struct Instance {
  MultiOmicsDataset ds;
  std::vector<IndicatorMatrix> g;
  std::vector<FactorStack> stacks;
  ConsensusEmbedding h;
};

// Two views, D = 5, N = 4, layers {3, 2}; the second view misses one sample.
Instance small_instance(std::mt19937_64& rng) {
  const auto ids = testing_support::sample_ids(4);
  OmicsView a{"a", gaussian(5, 4, rng), ids, {}};
  OmicsView b{"b", gaussian(5, 3, rng), {ids[0], ids[2], ids[3]}, {}};
  Instance in{MultiOmicsDataset({a, b}, ids), {}, {}, {}};
  in.g = in.ds.indicators();
  for (const auto& v : in.ds.views()) {
    FactorStack s;
    s.view_name = v.name;
    s.bases = {gaussian(5, 3, rng), gaussian(3, 2, rng)};
    s.latents = {MatrixXd::Zero(3, v.samples()), uniform(2, v.samples(), rng, 0.1, 1.0)};
    in.stacks.push_back(s);
  }
  in.h = {uniform(2, 4, rng), ids};
  return in;
}

double rel_error(const MatrixXd& analytic, const MatrixXd& numeric) {
  return (analytic - numeric).norm() / std::max(numeric.norm(), 1e-12);
}

MatrixXd central_difference(const std::function<double()>& loss, MatrixXd& param, double eps) {
  MatrixXd out(param.rows(), param.cols());
  for (Index i = 0; i < param.size(); ++i) {
    const double keep = param.data()[i];
    param.data()[i] = keep + eps;
    const double up = loss();
    param.data()[i] = keep - eps;
    const double down = loss();
    param.data()[i] = keep;
    out.data()[i] = (up - down) / (2.0 * eps);
  }
  return out;
}

// Distance of every pre-activation from the relu kink.
double kink_margin(const Instance& in) {
  double m = 1e300;
  for (const auto& s : in.stacks) m = std::min(m, (s.bases[1] * s.deepest()).cwiseAbs().minCoeff());
  return m;
}

}  // namespace

TEST_CASE("activations are nonnegative with finite derivatives") {
  MatrixXd x(1, 7);
  x << -800, -5, -1e-9, 0, 1e-9, 5, 800;
  for (auto a : {Activation::Sigmoid, Activation::Softplus, Activation::Relu}) {
    CHECK(activate(a, x).minCoeff() >= 0.0);
    CHECK(activate(a, x).allFinite());
    CHECK(activate_derivative(a, x).allFinite());
  }
  CHECK(activate_derivative(Activation::Relu, MatrixXd::Zero(1, 1))(0, 0) == 0.0);
  CHECK(parse_activation("softplus") == Activation::Softplus);
  CHECK_THROWS_AS(parse_activation("tanh"), Error);
}

TEST_CASE("loss matches a scalar-loop oracle") {
  std::mt19937_64 rng(1);
  for (auto act : {Activation::Sigmoid, Activation::Softplus, Activation::Relu}) {
    auto in = small_instance(rng);
    NonlinearSolverConfig cfg;
    cfg.activation = act;
    cfg.lambda1 = 0.3;
    cfg.lambda2 = 1.7;
    const double want = scalar_loss(in.stacks, in.h.values, in.ds, in.g, cfg);
    CHECK(std::abs(nonlinear_loss(in.stacks, in.h, in.ds, in.g, cfg) - want) <= 1e-10 * std::max(1.0, want));
  }
}

TEST_CASE("zero latents give the activation plateau") {
  std::mt19937_64 rng(2);
  for (auto act : {Activation::Sigmoid, Activation::Softplus}) {
    auto in = small_instance(rng);
    for (auto& s : in.stacks) s.deepest().setZero();
    in.h.values.setZero();
    NonlinearSolverConfig cfg;
    cfg.activation = act;
    const double plateau = act == Activation::Sigmoid ? 0.5 : std::log(2.0);
    double want = 0.0;
    for (std::size_t v = 0; v < 2; ++v) {
      const auto& s = in.stacks[v];
      const MatrixXd r = s.bases[0] * MatrixXd::Constant(3, s.deepest().cols(), plateau);
      want += (in.ds.views()[v].matrix - r).squaredNorm();
    }
    CHECK(nonlinear_loss(in.stacks, in.h, in.ds, in.g, cfg) == doctest::Approx(want).epsilon(1e-12));
    CHECK(scalar_loss(in.stacks, in.h.values, in.ds, in.g, cfg) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("relu on a nonnegative chain equals the linear loss") {
  std::mt19937_64 rng(3);
  auto in = small_instance(rng);
  for (auto& s : in.stacks) {
    s.bases[1] = s.bases[1].cwiseAbs();
    forward_pass(s, Activation::Relu);
  }
  NonlinearSolverConfig cfg;
  cfg.activation = Activation::Relu;
  const double lin = linear_loss(in.stacks, in.h, in.ds, in.g, cfg);
  CHECK(std::abs(nonlinear_loss(in.stacks, in.h, in.ds, in.g, cfg) - lin) <= 1e-10 * lin);
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 rng(4);
  const double eps = 1e-5;
  for (auto act : {Activation::Sigmoid, Activation::Softplus, Activation::Relu}) {
    for (int point = 0; point < 5; ++point) {
      auto in = small_instance(rng);
      while (act == Activation::Relu && kink_margin(in) < 1e-2) in = small_instance(rng);
      NonlinearSolverConfig cfg;
      cfg.activation = act;
      cfg.lambda1 = 0.5;
      cfg.lambda2 = 1.5;
      const auto grad = gradients(in.stacks, in.h, in.ds, in.g, cfg);
      auto loss = [&] { return nonlinear_loss(in.stacks, in.h, in.ds, in.g, cfg); };
      for (std::size_t v = 0; v < 2; ++v) {
        for (std::size_t i = 0; i < 2; ++i) {
          const MatrixXd fd = central_difference(loss, in.stacks[v].bases[i], eps);
          CHECK(rel_error(grad.views[v].bases[i], fd) < 1e-4);
        }
        const MatrixXd fd = central_difference(loss, in.stacks[v].deepest(), eps);
        CHECK(rel_error(grad.views[v].deepest, fd) < 1e-4);
      }
      CHECK(rel_error(grad.consensus, central_difference(loss, in.h.values, eps)) < 1e-4);
    }
  }
}

TEST_CASE("gradients vanish at a planted minimum") {
  std::mt19937_64 rng(5);
  auto in = small_instance(rng);
  NonlinearSolverConfig cfg;
  cfg.lambda1 = cfg.lambda2 = 0.0;
  std::vector<OmicsView> views;
  for (std::size_t v = 0; v < 2; ++v) {
    auto view = in.ds.views()[v];
    view.matrix = nonlinear_reconstruction(in.stacks[v], cfg.activation);
    views.push_back(view);
  }
  MultiOmicsDataset planted(views, in.ds.global_ids());
  const auto grad = gradients(in.stacks, in.h, planted, in.g, cfg);
  for (const auto& v : grad.views) {
    for (const auto& z : v.bases) CHECK(z.norm() < 1e-6);
    CHECK(v.deepest.norm() < 1e-6);
  }
  CHECK(grad.consensus.norm() < 1e-6);

  auto fit = refine_nonlinear(planted, cfg, in.stacks, in.h);
  CHECK(fit.loss_trace.front() < 1e-20);
  CHECK(fit.loss_trace.back() <= fit.loss_trace.front());
}

TEST_CASE("consensus gradient has the closed form") {
  std::mt19937_64 rng(6);
  auto in = small_instance(rng);
  NonlinearSolverConfig cfg;
  cfg.lambda2 = 2.5;
  const auto grad = gradients(in.stacks, in.h, in.ds, in.g, cfg);
  MatrixXd want = MatrixXd::Zero(2, 4);
  for (std::size_t v = 0; v < 2; ++v) {
    const MatrixXd gd = in.g[v].dense();
    want += 2.0 * cfg.lambda2 * (in.h.values * gd - in.stacks[v].deepest()) * gd.transpose();
  }
  CHECK((grad.consensus - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("backtracking trace is monotone and latents stay nonnegative") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    const auto ds = testing_support::random_dataset(rng, 20, {10, 8}, 0.7);
    NonlinearSolverConfig cfg;
    cfg.layer_sizes = {5, 2};
    cfg.max_iters = 60;
    cfg.seed = seed;
    const auto fit = fit_nonlinear(ds, cfg);
    for (std::size_t i = 1; i < fit.loss_trace.size(); ++i) CHECK(fit.loss_trace[i] < fit.loss_trace[i - 1]);
    for (const auto& s : fit.stacks) CHECK(s.deepest().minCoeff() >= 0.0);
    CHECK(std::isfinite(fit.loss_trace.back()));
  }
}

TEST_CASE("nonlinear config validation") {
  NonlinearSolverConfig cfg;
  cfg.alpha0 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.alpha0 = 1e-2;
  cfg.backtrack = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
