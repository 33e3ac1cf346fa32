#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mlmf/error.hpp"
#include "mlmf/evaluation.hpp"
#include "mlmf/pipeline.hpp"

namespace py = pybind11;
using namespace py::literals;
using mlmf::Index;
using mlmf::MatrixXd;

namespace {

// views: list of (name, D x N_v matrix, sample ids)
using ViewTuple = std::tuple<std::string, MatrixXd, std::vector<std::string>>;

mlmf::MultiOmicsDataset to_dataset(const std::vector<ViewTuple>& views, bool zscore) {
  std::vector<mlmf::OmicsView> out;
  for (const auto& [name, matrix, ids] : views) out.push_back({name, matrix, ids, {}});
  mlmf::MultiOmicsDataset ds(std::move(out));
  return zscore ? ds.normalized() : ds;
}

py::dict fit(const std::vector<ViewTuple>& views, int n_clusters, const std::string& mode,
             std::vector<Index> layer_sizes, double lambda1, double lambda2, const std::string& activation,
             std::uint64_t seed, int max_iters, double tol, bool zscore) {
  mlmf::RunConfig rc;
  rc.mode = mlmf::parse_mode(mode);
  rc.n_clusters = n_clusters;
  rc.layer_sizes = std::move(layer_sizes);
  rc.lambda1 = lambda1;
  rc.lambda2 = lambda2;
  rc.activation = mlmf::parse_activation(activation);
  rc.seed = seed;
  rc.max_iters = max_iters;
  rc.tol = tol;
  const auto ds = to_dataset(views, zscore);
  mlmf::FitResult fit;
  {
    py::gil_scoped_release release;
    Index max_rank = 32;
    for (const auto& v : ds.views()) max_rank = std::min({max_rank, v.features(), v.samples()});
    if (rc.mode == mlmf::SolverMode::Linear) {
      auto cfg = rc.linear_config();
      cfg.layer_sizes = rc.resolved_layer_sizes(max_rank);
      fit = mlmf::fit_linear(ds, cfg);
    } else {
      auto cfg = rc.nonlinear_config();
      cfg.layer_sizes = rc.resolved_layer_sizes(max_rank);
      fit = mlmf::fit_nonlinear(ds, cfg);
    }
  }
  const auto assignment = mlmf::spectral_cluster(fit.consensus, n_clusters, rc.spectral_options());
  return py::dict("consensus"_a = fit.consensus.values, "sample_ids"_a = fit.consensus.global_ids,
                  "labels"_a = assignment.labels, "loss_trace"_a = fit.loss_trace, "iterations"_a = fit.iterations,
                  "status"_a = std::string(mlmf::to_string(fit.status)), "warnings"_a = fit.warnings);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-layer matrix factorization for multi-omics clustering";
  m.attr("__version__") = std::string(mlmf::library_version());

  static py::exception<mlmf::Error> error(m, "MlmfError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const mlmf::Error& e) {
      const std::string msg = std::string(mlmf::to_string(e.code())) + ": " + e.what();
      PyErr_SetString(error.ptr(), msg.c_str());
    }
  });

  m.def("build_indicator",
        [](const std::vector<std::string>& view_ids, const std::vector<std::string>& global_ids) {
          return mlmf::build_indicator(view_ids, global_ids).dense();
        },
        "view_ids"_a, "global_ids"_a, "Dense N x N_v selector placing view samples into global slots.");

  m.def("zscore_normalize", &mlmf::zscore_normalize, "matrix"_a,
        "Per-row standardization with the population standard deviation.");

  m.def("semi_nmf",
        [](const MatrixXd& x, Index rank, int max_iters, double tol, std::uint64_t seed) {
          const auto r = mlmf::semi_nmf(x, rank, {max_iters, tol, seed});
          return py::dict("basis"_a = r.factors.basis, "coefficients"_a = r.factors.coefficients,
                          "loss_trace"_a = r.loss_trace, "iterations"_a = r.iterations);
        },
        "matrix"_a, "rank"_a, "max_iters"_a = 500, "tol"_a = 1e-6, "seed"_a = 0);

  m.def("fit", &fit, "views"_a, "n_clusters"_a = 3, "mode"_a = "linear", "layer_sizes"_a = std::vector<Index>{},
        "lambda1"_a = 1.0, "lambda2"_a = 1.0, "activation"_a = "sigmoid", "seed"_a = 0, "max_iters"_a = 500,
        "tol"_a = 1e-6, "zscore"_a = true,
        "Fits the factorization on a list of (name, features x samples matrix, sample ids) views and clusters "
        "the consensus embedding.");

  m.def("knn_similarity",
        [](const MatrixXd& points, Index k_neighbors, std::optional<double> sigma) {
          return mlmf::knn_similarity(points, k_neighbors, sigma).weights;
        },
        "points"_a, "k_neighbors"_a, "sigma"_a = py::none(), "Affinity matrix over the columns of `points`.");

  m.def("normalized_laplacian", &mlmf::normalized_laplacian, "weights"_a);

  m.def("spectral_cluster",
        [](const MatrixXd& embedding, int k, std::optional<Index> k_neighbors, std::optional<double> sigma,
           std::uint64_t seed) {
          mlmf::SpectralOptions opts;
          opts.k_neighbors = k_neighbors;
          opts.sigma = sigma;
          opts.kmeans.seed = seed;
          return mlmf::spectral_cluster({embedding, {}}, k, opts).labels;
        },
        "embedding"_a, "k"_a, "k_neighbors"_a = py::none(), "sigma"_a = py::none(), "seed"_a = 0,
        "Clusters the columns of a d x N embedding.");

  m.def("kmeans",
        [](const MatrixXd& points, int k, int restarts, std::uint64_t seed) {
          const auto r = mlmf::kmeans(points, k, {restarts, 300, seed});
          return py::dict("labels"_a = r.labels, "centers"_a = r.centers, "inertia"_a = r.inertia);
        },
        "points"_a, "k"_a, "restarts"_a = 10, "seed"_a = 0, "Rows of `points` are observations.");

  m.def("logrank_test",
        [](const std::vector<double>& times, const std::vector<bool>& events, const std::vector<int>& labels) {
          if (times.size() != events.size()) throw mlmf::Error(mlmf::ErrorCode::LengthMismatch, "times vs events");
          std::vector<mlmf::SurvivalRecord> records;
          for (std::size_t i = 0; i < times.size(); ++i) records.push_back({std::to_string(i), times[i], events[i]});
          const auto r = mlmf::logrank_test(records, labels);
          return py::dict("statistic"_a = r.statistic, "dof"_a = r.dof, "p_value"_a = r.p_value,
                          "observed"_a = r.observed, "expected"_a = r.expected);
        },
        "times"_a, "events"_a, "labels"_a);

  m.def("adjusted_rand_index", &mlmf::adjusted_rand_index, "a"_a, "b"_a);
  m.def("normalized_mutual_information", &mlmf::normalized_mutual_information, "a"_a, "b"_a);

  m.def("generate_synthetic",
        [](int n_clusters, int samples_per_cluster, const std::vector<Index>& dims, double noise, std::uint64_t seed) {
          mlmf::SyntheticSpec spec;
          spec.n_clusters = n_clusters;
          spec.samples_per_cluster = samples_per_cluster;
          spec.views.clear();
          for (Index d : dims) spec.views.push_back({d, noise});
          spec.seed = seed;
          const auto data = mlmf::generate_synthetic(spec);
          py::list views;
          for (const auto& v : data.dataset.views()) views.append(py::make_tuple(v.name, v.matrix, v.sample_ids));
          return py::dict("views"_a = views, "sample_ids"_a = data.dataset.global_ids(), "labels"_a = data.labels);
        },
        "n_clusters"_a = 3, "samples_per_cluster"_a = 50, "dims"_a = std::vector<Index>{100, 80}, "noise"_a = 0.1,
        "seed"_a = 0);
}
