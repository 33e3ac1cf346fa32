#include "mlmf/cli.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mlmf/error.hpp"
#include "mlmf/pipeline.hpp"

namespace mlmf {

namespace {

namespace fs = std::filesystem;

// Flag values as parsed; unset optionals leave the config file's value alone.
struct RunFlags {
  std::string config;
  std::vector<std::string> data;
  std::vector<std::string> data_rows;
  std::string survival, clinical, labels;
  std::string mode, activation, layers, k_neighbors, sigma, output;
  std::optional<int> n_clusters, max_iters, restarts;
  std::optional<double> lambda1, lambda2, tol, alpha0;
  std::optional<std::uint64_t> seed;
  bool no_zscore = false;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("-c,--config", f.config, "Run configuration file");
  app->add_option("--data", f.data, "View as NAME=PATH (features x samples); repeatable");
  app->add_option("--data-rows", f.data_rows, "View as NAME=PATH with samples as rows; repeatable");
  app->add_option("--survival", f.survival, "Survival CSV (sample_id,time,event)");
  app->add_option("--clinical", f.clinical, "Clinical CSV");
  app->add_option("--labels", f.labels, "Ground-truth labels CSV (sample_id,label)");
  app->add_option("--mode", f.mode, "linear | nonlinear");
  app->add_option("--layers", f.layers, "Comma-separated layer sizes, e.g. 32,3 (default auto: 32,<clusters>)");
  app->add_option("-k,--clusters", f.n_clusters, "Number of clusters");
  app->add_option("--lambda1", f.lambda1, "Sparsity weight");
  app->add_option("--lambda2", f.lambda2, "Consensus weight");
  app->add_option("--activation", f.activation, "sigmoid | softplus | relu");
  app->add_option("--k-neighbors", f.k_neighbors, "kNN graph degree, or auto");
  app->add_option("--sigma", f.sigma, "Gaussian kernel width, or auto");
  app->add_option("--seed", f.seed, "Random seed")->required();
  app->add_option("--max-iters", f.max_iters, "Solver iteration cap");
  app->add_option("--tol", f.tol, "Relative loss-change tolerance");
  app->add_option("--alpha0", f.alpha0, "Initial step size (nonlinear)");
  app->add_option("--kmeans-restarts", f.restarts, "k-means restarts");
  app->add_flag("--no-zscore", f.no_zscore, "Skip per-feature z-scoring");
  app->add_option("-o,--out", f.output, "Output directory");
}

ViewSource parse_view_flag(const std::string& text, bool samples_as_rows) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    raise(ErrorCode::BadConfig, "view must be given as NAME=PATH, got '" + text + "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1), samples_as_rows};
}

std::vector<Index> parse_index_list(const std::string& text, const char* what) {
  std::vector<Index> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    double v = 0;
    try {
      v = parse_double(item);
    } catch (const Error&) {
      raise(ErrorCode::BadConfig, std::string(what) + ": '" + item + "' is not a number");
    }
    if (v != std::floor(v) || v < 1) raise(ErrorCode::BadConfig, std::string(what) + ": '" + item + "' is not a positive integer");
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(parse_double(item));
    } catch (const Error&) {
      raise(ErrorCode::BadConfig, std::string(what) + ": '" + item + "' is not a number");
    }
  }
  return out;
}

RunConfig resolve_config(const RunFlags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (!f.data.empty() || !f.data_rows.empty()) {
    c.views.clear();
    for (const auto& d : f.data) c.views.push_back(parse_view_flag(d, false));
    for (const auto& d : f.data_rows) c.views.push_back(parse_view_flag(d, true));
  }
  if (!f.survival.empty()) c.survival = fs::path(f.survival);
  if (!f.clinical.empty()) c.clinical = fs::path(f.clinical);
  if (!f.labels.empty()) c.labels = fs::path(f.labels);
  if (!f.mode.empty()) c.mode = parse_mode(f.mode);
  if (!f.activation.empty()) c.activation = parse_activation(f.activation);
  if (!f.layers.empty()) c.layer_sizes = f.layers == "auto" ? std::vector<Index>{} : parse_index_list(f.layers, "--layers");
  if (!f.k_neighbors.empty()) {
    c.k_neighbors = f.k_neighbors == "auto" ? std::nullopt
                                            : std::optional<Index>(parse_index_list(f.k_neighbors, "--k-neighbors").at(0));
  }
  if (!f.sigma.empty()) {
    c.sigma = f.sigma == "auto" ? std::nullopt : std::optional<double>(parse_double_list(f.sigma, "--sigma").at(0));
  }
  if (f.n_clusters) c.n_clusters = *f.n_clusters;
  if (f.max_iters) c.max_iters = *f.max_iters;
  if (f.restarts) c.kmeans_restarts = *f.restarts;
  if (f.lambda1) c.lambda1 = *f.lambda1;
  if (f.lambda2) c.lambda2 = *f.lambda2;
  if (f.tol) c.tol = *f.tol;
  if (f.alpha0) c.alpha0 = *f.alpha0;
  if (f.seed) c.seed = *f.seed;
  if (f.no_zscore) c.zscore = false;
  if (!f.output.empty()) c.output_dir = f.output;
  return c;
}

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : "-"; }

void print_summary(const RunReport& r) {
  const auto& e = r.evaluation;
  std::cout << "status=" << r.status << " iterations=" << r.iterations
            << " final_loss=" << (r.loss_trace.empty() ? "-" : format_double(r.loss_trace.back()))
            << " ari=" << opt_text(e.ari) << " nmi=" << opt_text(e.nmi) << " logrank_p=" << opt_text(e.logrank_p)
            << " enriched=" << (e.enriched_count ? std::to_string(*e.enriched_count) : "-") << '\n';
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
}

std::string strip_code(const std::string& message, ErrorCode code) {
  const std::string prefix = std::string(to_string(code)) + ": ";
  return message.rfind(prefix, 0) == 0 ? message.substr(prefix.size()) : message;
}

std::string one_line(std::string s) {
  for (auto& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Multi-view deep matrix factorization clustering"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(library_version()));

  RunFlags fit_flags;
  auto* fit = app.add_subcommand("fit", "Fit, cluster and evaluate");
  add_run_flags(fit, fit_flags);

  RunFlags sim_flags;
  std::string mask_view_name, rates_text;
  int repeats = 5, threads = 0;
  auto* sim = app.add_subcommand("simulate-missing", "Mask samples out of one view and rerun over a grid of rates");
  add_run_flags(sim, sim_flags);
  sim->add_option("--mask-view", mask_view_name, "View to mask")->required();
  sim->add_option("--rates", rates_text, "Comma-separated missing rates (default 0.1,0.3,0.5,0.7)");
  sim->add_option("--repeats", repeats, "Repeats per rate");
  sim->add_option("--threads", threads, "Worker threads (0: hardware concurrency)");

  SyntheticSpec gen_spec;
  std::string gen_out = "synthetic", gen_dims, gen_noise;
  auto* gen = app.add_subcommand("generate", "Write a synthetic multi-view dataset");
  gen->add_option("--seed", gen_spec.seed, "Random seed")->required();
  gen->add_option("-k,--clusters", gen_spec.n_clusters, "Number of clusters");
  gen->add_option("--samples-per-cluster", gen_spec.samples_per_cluster, "Samples per cluster");
  gen->add_option("--dims", gen_dims, "Comma-separated view dimensions (default 100,80)");
  gen->add_option("--noise", gen_noise, "Noise sigma, one value or one per view (default 0.1)");
  gen->add_option("--latent-dim", gen_spec.latent_dim, "Latent dimension");
  gen->add_option("--separation", gen_spec.separation, "Closest center gap per coordinate (RMS)");
  gen->add_option("-o,--out", gen_out, "Output directory");

  std::string eval_assignment, eval_config, eval_survival, eval_clinical, eval_labels, eval_out;
  auto* eval = app.add_subcommand("evaluate", "Re-score an existing assignment CSV");
  eval->add_option("assignment", eval_assignment, "Assignment CSV (sample_id,cluster)")->required();
  eval->add_option("-c,--config", eval_config, "Take survival / clinical / labels paths from this config");
  eval->add_option("--survival", eval_survival, "Survival CSV");
  eval->add_option("--clinical", eval_clinical, "Clinical CSV");
  eval->add_option("--labels", eval_labels, "Ground-truth labels CSV");
  eval->add_option("-o,--out", eval_out, "Write the evaluation as JSON here");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      raise(ErrorCode::BadConfig, e.what());
    }

    if (*fit) {
      print_summary(cmd_fit(resolve_config(fit_flags)));
    } else if (*sim) {
      const auto config = resolve_config(sim_flags);
      const auto rates = rates_text.empty() ? kDefaultMissingRates : parse_double_list(rates_text, "--rates");
      const auto rows = cmd_simulate_missing(config, mask_view_name, rates, repeats, threads);
      std::cout << grid_csv(rows);
    } else if (*gen) {
      if (!gen_dims.empty() || !gen_noise.empty()) {
        std::vector<Index> dims;
        if (gen_dims.empty()) {
          for (const auto& v : gen_spec.views) dims.push_back(v.dim);
        } else {
          dims = parse_index_list(gen_dims, "--dims");
        }
        auto noise = gen_noise.empty() ? std::vector<double>{0.1} : parse_double_list(gen_noise, "--noise");
        if (noise.size() != 1 && noise.size() != dims.size()) {
          raise(ErrorCode::BadConfig, "--noise needs one value or one per view");
        }
        gen_spec.views.clear();
        for (std::size_t i = 0; i < dims.size(); ++i) {
          gen_spec.views.push_back({dims[i], noise.size() == 1 ? noise[0] : noise[i]});
        }
      }
      const auto data = cmd_generate(gen_spec, gen_out);
      std::cout << "wrote " << data.dataset.views().size() << " views, " << data.labels.size() << " samples to "
                << gen_out << '\n';
    } else if (*eval) {
      RunConfig sources = eval_config.empty() ? RunConfig{} : load_config(eval_config);
      if (!eval_survival.empty()) sources.survival = fs::path(eval_survival);
      if (!eval_clinical.empty()) sources.clinical = fs::path(eval_clinical);
      if (!eval_labels.empty()) sources.labels = fs::path(eval_labels);
      if (!sources.survival && !sources.clinical && !sources.labels) {
        raise(ErrorCode::BadConfig, "evaluate needs at least one of --survival, --clinical, --labels");
      }
      const auto out = eval_out.empty() ? std::nullopt : std::optional<fs::path>(eval_out);
      std::cout << to_json(cmd_evaluate(eval_assignment, sources, out)).dump(2) << '\n';
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.code()) << ':' << to_string(e.error_class()) << "] "
              << one_line(strip_code(e.what(), e.code())) << std::endl;
    return static_cast<int>(e.error_class());
  } catch (const std::exception& e) {
    std::cerr << "error[Internal:internal] " << one_line(e.what()) << std::endl;
    return 1;
  }
}

}  // namespace mlmf
