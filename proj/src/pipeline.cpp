#include "mlmf/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mlmf/error.hpp"

#ifndef MLMF_VERSION
#define MLMF_VERSION "0.0.0"
#endif

namespace mlmf {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view library_version() noexcept { return MLMF_VERSION; }

std::string_view to_string(SolverMode mode) noexcept {
  return mode == SolverMode::Linear ? "linear" : "nonlinear";
}

SolverMode parse_mode(std::string_view name) {
  if (name == "linear") return SolverMode::Linear;
  if (name == "nonlinear") return SolverMode::Nonlinear;
  raise(ErrorCode::BadConfig, "mode must be 'linear' or 'nonlinear', got '" + std::string(name) + "'");
}

// ---- RunConfig ----------------------------------------------------------

void RunConfig::validate() const {
  if (views.empty()) raise(ErrorCode::BadConfig, "no input views configured");
  if (n_clusters < 2) raise(ErrorCode::BadConfig, "n_clusters must be >= 2");
  const auto sizes = resolved_layer_sizes();
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) raise(ErrorCode::BadConfig, "layer sizes must be positive");
    if (i > 0 && sizes[i] >= sizes[i - 1]) raise(ErrorCode::BadConfig, "layer_sizes must be strictly decreasing");
  }
  if (sizes.back() < n_clusters) raise(ErrorCode::BadConfig, "last layer size must be >= n_clusters");
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) raise(ErrorCode::BadConfig, "lambda1 and lambda2 must be >= 0");
  if (k_neighbors && *k_neighbors < 1) raise(ErrorCode::BadConfig, "k_neighbors must be >= 1");
  if (sigma && !(*sigma > 0.0)) raise(ErrorCode::BadConfig, "sigma must be > 0 or auto");
  if (max_iters < 0) raise(ErrorCode::BadConfig, "max_iters must be >= 0");
  if (!(tol >= 0.0)) raise(ErrorCode::BadConfig, "tol must be >= 0");
  if (!(alpha0 > 0.0)) raise(ErrorCode::BadConfig, "alpha0 must be > 0");
  if (kmeans_restarts < 1) raise(ErrorCode::BadConfig, "kmeans_restarts must be >= 1");
  for (const auto& v : views) {
    if (!fs::exists(v.path)) raise(ErrorCode::MissingFile, "view '" + v.name + "' file not found: " + v.path.string());
  }
  for (const auto* p : {&survival, &clinical, &labels}) {
    if (*p && !fs::exists(**p)) raise(ErrorCode::MissingFile, "file not found: " + (*p)->string());
  }
}

std::vector<Index> RunConfig::resolved_layer_sizes(Index max_rank) const {
  if (!layer_sizes.empty()) return layer_sizes;
  const Index first = std::min<Index>(32, max_rank);
  if (first <= n_clusters) return {static_cast<Index>(n_clusters)};
  return {first, static_cast<Index>(n_clusters)};
}

SolverConfig RunConfig::linear_config() const {
  SolverConfig c;
  c.lambda1 = lambda1;
  c.lambda2 = lambda2;
  c.layer_sizes = resolved_layer_sizes();
  c.max_iters = max_iters;
  c.tol = tol;
  c.seed = seed;
  return c;
}

NonlinearSolverConfig RunConfig::nonlinear_config() const {
  NonlinearSolverConfig c;
  static_cast<SolverConfig&>(c) = linear_config();
  c.activation = activation;
  c.alpha0 = alpha0;
  return c;
}

SpectralOptions RunConfig::spectral_options() const {
  SpectralOptions o;
  o.k_neighbors = k_neighbors;
  o.sigma = sigma;
  o.kmeans.seed = seed;
  o.kmeans.restarts = kmeans_restarts;
  return o;
}

namespace {

std::vector<Index> parse_sizes(const std::string& text) {
  std::vector<Index> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    const double v = parse_double(std::string(item.begin() + static_cast<std::ptrdiff_t>(item.find_first_not_of(" \t")),
                                              item.end()));
    if (v != std::floor(v) || v < 1) raise(ErrorCode::BadConfig, "layer size '" + item + "' is not a positive integer");
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  raise(ErrorCode::BadConfig, "expected a boolean, got '" + s + "'");
}

template <typename T>
T number(const std::string& key, const std::string& text) {
  if constexpr (std::is_integral_v<T>) {
    T v{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size()) {
      raise(ErrorCode::BadConfig, "'" + key + "' expects an integer, got '" + text + "'");
    }
    return v;
  } else {
    try {
      return parse_double(text);
    } catch (const Error&) {
      raise(ErrorCode::BadConfig, "'" + key + "' expects a number, got '" + text + "'");
    }
  }
}

std::string sizes_text(const std::vector<Index>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) out += (i ? "," : "") + std::to_string(sizes[i]);
  return out;
}

}  // namespace

RunConfig load_config(const fs::path& path) {
  namespace pt = boost::property_tree;
  if (!fs::exists(path)) raise(ErrorCode::MissingFile, "config file not found: " + path.string());
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    raise(ErrorCode::BadConfig, e.what());
  }
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  RunConfig c;
  for (const auto& [key, node] : tree) {
    if (!node.empty()) {
      // section
      const std::string prefix = "view ";
      if (key.rfind(prefix, 0) != 0) raise(ErrorCode::BadConfig, "unknown section [" + key + "]");
      ViewSource v;
      v.name = key.substr(prefix.size());
      for (const auto& [k, val] : node) {
        const auto s = val.get_value<std::string>();
        if (k == "path") {
          v.path = resolve(s);
        } else if (k == "samples_as_rows") {
          v.samples_as_rows = parse_bool(s);
        } else {
          raise(ErrorCode::BadConfig, "unknown key '" + k + "' in [" + key + "]");
        }
      }
      if (v.path.empty()) raise(ErrorCode::BadConfig, "[" + key + "] has no path");
      c.views.push_back(std::move(v));
      continue;
    }
    const auto s = node.get_value<std::string>();
    if (key == "mode") c.mode = parse_mode(s);
    else if (key == "survival") c.survival = resolve(s);
    else if (key == "clinical") c.clinical = resolve(s);
    else if (key == "labels") c.labels = resolve(s);
    else if (key == "layer_sizes") c.layer_sizes = s == "auto" ? std::vector<Index>{} : parse_sizes(s);
    else if (key == "n_clusters") c.n_clusters = number<int>(key, s);
    else if (key == "lambda1") c.lambda1 = number<double>(key, s);
    else if (key == "lambda2") c.lambda2 = number<double>(key, s);
    else if (key == "activation") c.activation = parse_activation(s);
    else if (key == "k_neighbors") c.k_neighbors = s == "auto" ? std::nullopt : std::optional<Index>(number<Index>(key, s));
    else if (key == "sigma") c.sigma = s == "auto" ? std::nullopt : std::optional<double>(number<double>(key, s));
    else if (key == "seed") c.seed = number<std::uint64_t>(key, s);
    else if (key == "max_iters") c.max_iters = number<int>(key, s);
    else if (key == "tol") c.tol = number<double>(key, s);
    else if (key == "alpha0") c.alpha0 = number<double>(key, s);
    else if (key == "zscore") c.zscore = parse_bool(s);
    else if (key == "kmeans_restarts") c.kmeans_restarts = number<int>(key, s);
    else if (key == "output_dir") c.output_dir = resolve(s);
    else raise(ErrorCode::BadConfig, "unknown key '" + key + "'");
  }
  return c;
}

std::string config_ini(const RunConfig& c) {
  std::ostringstream out;
  out << "mode = " << to_string(c.mode) << '\n';
  out << "n_clusters = " << c.n_clusters << '\n';
  out << "layer_sizes = " << (c.layer_sizes.empty() ? "auto" : sizes_text(c.layer_sizes)) << '\n';
  out << "lambda1 = " << format_double(c.lambda1) << '\n';
  out << "lambda2 = " << format_double(c.lambda2) << '\n';
  out << "activation = " << to_string(c.activation) << '\n';
  out << "k_neighbors = " << (c.k_neighbors ? std::to_string(*c.k_neighbors) : "auto") << '\n';
  out << "sigma = " << (c.sigma ? format_double(*c.sigma) : "auto") << '\n';
  out << "seed = " << c.seed << '\n';
  out << "max_iters = " << c.max_iters << '\n';
  out << "tol = " << format_double(c.tol) << '\n';
  out << "alpha0 = " << format_double(c.alpha0) << '\n';
  out << "zscore = " << (c.zscore ? "true" : "false") << '\n';
  out << "kmeans_restarts = " << c.kmeans_restarts << '\n';
  out << "output_dir = " << c.output_dir.string() << '\n';
  if (c.survival) out << "survival = " << c.survival->string() << '\n';
  if (c.clinical) out << "clinical = " << c.clinical->string() << '\n';
  if (c.labels) out << "labels = " << c.labels->string() << '\n';
  for (const auto& v : c.views) {
    out << "\n[view " << v.name << "]\npath = " << v.path.string() << '\n';
    if (v.samples_as_rows) out << "samples_as_rows = true\n";
  }
  return out.str();
}

// ---- JSON ---------------------------------------------------------------

namespace {

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

std::optional<fs::path> get_path(const json& j, const char* key) {
  auto s = get_optional<std::string>(j, key);
  if (!s) return std::nullopt;
  return fs::path(*s);
}

}  // namespace

json to_json(const RunConfig& c) {
  json j;
  j["mode"] = to_string(c.mode);
  j["views"] = json::array();
  for (const auto& v : c.views) {
    j["views"].push_back({{"name", v.name}, {"path", v.path.string()}, {"samples_as_rows", v.samples_as_rows}});
  }
  j["survival"] = c.survival ? json(c.survival->string()) : json(nullptr);
  j["clinical"] = c.clinical ? json(c.clinical->string()) : json(nullptr);
  j["labels"] = c.labels ? json(c.labels->string()) : json(nullptr);
  j["layer_sizes"] = c.layer_sizes;
  j["n_clusters"] = c.n_clusters;
  j["lambda1"] = c.lambda1;
  j["lambda2"] = c.lambda2;
  j["activation"] = to_string(c.activation);
  put_optional(j, "k_neighbors", c.k_neighbors);
  put_optional(j, "sigma", c.sigma);
  j["seed"] = c.seed;
  j["max_iters"] = c.max_iters;
  j["tol"] = c.tol;
  j["alpha0"] = c.alpha0;
  j["zscore"] = c.zscore;
  j["kmeans_restarts"] = c.kmeans_restarts;
  j["output_dir"] = c.output_dir.string();
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.mode = parse_mode(j.at("mode").get<std::string>());
  for (const auto& v : j.at("views")) {
    c.views.push_back({v.at("name").get<std::string>(), v.at("path").get<std::string>(),
                       v.at("samples_as_rows").get<bool>()});
  }
  c.survival = get_path(j, "survival");
  c.clinical = get_path(j, "clinical");
  c.labels = get_path(j, "labels");
  c.layer_sizes = j.at("layer_sizes").get<std::vector<Index>>();
  c.n_clusters = j.at("n_clusters").get<int>();
  c.lambda1 = j.at("lambda1").get<double>();
  c.lambda2 = j.at("lambda2").get<double>();
  c.activation = parse_activation(j.at("activation").get<std::string>());
  c.k_neighbors = get_optional<Index>(j, "k_neighbors");
  c.sigma = get_optional<double>(j, "sigma");
  c.seed = j.at("seed").get<std::uint64_t>();
  c.max_iters = j.at("max_iters").get<int>();
  c.tol = j.at("tol").get<double>();
  c.alpha0 = j.at("alpha0").get<double>();
  c.zscore = j.at("zscore").get<bool>();
  c.kmeans_restarts = j.at("kmeans_restarts").get<int>();
  c.output_dir = j.at("output_dir").get<std::string>();
  return c;
}

json to_json(const EvaluationReport& r) {
  json j;
  put_optional(j, "logrank_p", r.logrank_p);
  put_optional(j, "neg_log10_p", r.neg_log10_p);
  put_optional(j, "enriched_count", r.enriched_count);
  j["per_parameter_p"] = r.per_parameter_p;
  put_optional(j, "ari", r.ari);
  put_optional(j, "nmi", r.nmi);
  return j;
}

EvaluationReport evaluation_from_json(const json& j) {
  EvaluationReport r;
  r.logrank_p = get_optional<double>(j, "logrank_p");
  r.neg_log10_p = get_optional<double>(j, "neg_log10_p");
  r.enriched_count = get_optional<int>(j, "enriched_count");
  r.per_parameter_p = j.at("per_parameter_p").get<std::map<std::string, double>>();
  r.ari = get_optional<double>(j, "ari");
  r.nmi = get_optional<double>(j, "nmi");
  return r;
}

json to_json(const RunReport& r) {
  json j;
  j["version"] = r.version;
  j["config"] = to_json(r.config);
  j["seed"] = r.seed;
  j["loss_trace"] = r.loss_trace;
  j["iterations"] = r.iterations;
  j["status"] = r.status;
  j["wall_clock_seconds"] = r.wall_clock_seconds;
  j["assignment"] = {{"k", r.assignment.k}, {"labels", r.assignment.labels}, {"global_ids", r.assignment.global_ids}};
  j["evaluation"] = to_json(r.evaluation);
  j["warnings"] = r.warnings;
  return j;
}

RunReport report_from_json(const json& j) {
  RunReport r;
  r.version = j.at("version").get<std::string>();
  r.config = config_from_json(j.at("config"));
  r.seed = j.at("seed").get<std::uint64_t>();
  r.loss_trace = j.at("loss_trace").get<std::vector<double>>();
  r.iterations = j.at("iterations").get<int>();
  r.status = j.at("status").get<std::string>();
  r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
  const auto& a = j.at("assignment");
  r.assignment.k = a.at("k").get<int>();
  r.assignment.labels = a.at("labels").get<std::vector<int>>();
  r.assignment.global_ids = a.at("global_ids").get<std::vector<std::string>>();
  r.evaluation = evaluation_from_json(j.at("evaluation"));
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

// ---- pipeline -----------------------------------------------------------

MultiOmicsDataset load_dataset(const RunConfig& config) {
  std::vector<OmicsView> views;
  for (const auto& src : config.views) {
    auto view = read_view(src.path, src.name, src.samples_as_rows);
    if (config.zscore) view.matrix = zscore_normalize(view.matrix);
    views.push_back(std::move(view));
  }
  return MultiOmicsDataset(std::move(views));
}

EvaluationReport evaluate_assignment(const ClusterAssignment& assignment, const RunConfig& config,
                                     std::vector<std::string>* warnings) {
  EvaluationReport report;
  if (config.survival) {
    const auto lr = logrank_test(read_survival(*config.survival), assignment);
    const double p = std::max(lr.p_value, std::numeric_limits<double>::min());
    report.logrank_p = p;
    report.neg_log10_p = -std::log10(p);
  }
  if (config.clinical) {
    const auto en = enrichment_analysis(read_clinical(*config.clinical), assignment);
    report.enriched_count = en.enriched_count;
    for (const auto& t : en.tests) report.per_parameter_p[t.parameter] = t.p_value;
    if (warnings) warnings->insert(warnings->end(), en.warnings.begin(), en.warnings.end());
  }
  if (config.labels) {
    std::unordered_map<std::string, int> truth;
    for (const auto& [id, label] : read_labels(*config.labels)) truth[id] = label;
    std::vector<int> predicted, expected;
    for (std::size_t i = 0; i < assignment.global_ids.size(); ++i) {
      auto it = truth.find(assignment.global_ids[i]);
      if (it == truth.end()) continue;
      predicted.push_back(assignment.labels[i]);
      expected.push_back(it->second);
    }
    if (predicted.empty()) raise(ErrorCode::LengthMismatch, "no assigned sample has a ground-truth label");
    report.ari = adjusted_rand_index(expected, predicted);
    report.nmi = normalized_mutual_information(expected, predicted);
  }
  return report;
}

RunReport run_pipeline(const RunConfig& config, const MultiOmicsDataset& dataset) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.version = std::string(library_version());
  report.config = config;
  report.seed = config.seed;

  Index max_rank = 32;
  for (const auto& v : dataset.views()) max_rank = std::min({max_rank, v.features(), v.samples()});
  FitResult fit;
  if (config.mode == SolverMode::Linear) {
    auto solver = config.linear_config();
    solver.layer_sizes = config.resolved_layer_sizes(max_rank);
    fit = fit_linear(dataset, solver);
  } else {
    auto solver = config.nonlinear_config();
    solver.layer_sizes = config.resolved_layer_sizes(max_rank);
    fit = fit_nonlinear(dataset, solver);
  }
  report.loss_trace = fit.loss_trace;
  report.iterations = fit.iterations;
  report.status = std::string(to_string(fit.status));
  report.warnings = fit.warnings;
  report.assignment = spectral_cluster(fit.consensus, config.n_clusters, config.spectral_options());
  report.evaluation = evaluate_assignment(report.assignment, config, &report.warnings);
  report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

namespace {

std::string loss_csv(const std::vector<double>& trace) {
  std::ostringstream out;
  out << "iteration,loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i) out << i << ',' << format_double(trace[i]) << '\n';
  return out.str();
}

}  // namespace

RunReport cmd_fit(const RunConfig& config) {
  config.validate();
  const auto dataset = load_dataset(config);
  auto report = run_pipeline(config, dataset);
  write_file_atomic(config.output_dir / "assignment.csv",
                    labels_csv(report.assignment.global_ids, report.assignment.labels));
  write_file_atomic(config.output_dir / "loss_trace.csv", loss_csv(report.loss_trace));
  write_file_atomic(config.output_dir / "report.json", to_json(report).dump(2) + "\n");
  return report;
}

std::uint64_t cell_seed(std::uint64_t seed, std::size_t rate_index, int repeat) {
  // splitmix64 finalizer over the combined index
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (1 + rate_index * 1000003ULL + static_cast<std::uint64_t>(repeat));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<GridRow> cmd_simulate_missing(const RunConfig& config, const std::string& view,
                                          const std::vector<double>& rates, int repeats, int threads) {
  config.validate();
  if (repeats < 1) raise(ErrorCode::BadConfig, "repeats must be >= 1");
  if (rates.empty()) raise(ErrorCode::BadConfig, "no missing rates given");
  for (double r : rates) {
    if (!(r >= 0.0 && r < 1.0)) raise(ErrorCode::BadConfig, "missing rates must lie in [0, 1)");
  }
  RunConfig raw_config = config;
  raw_config.zscore = false;
  const auto raw = load_dataset(raw_config);
  (void)raw.view_index(view);

  std::vector<GridRow> rows(rates.size() * static_cast<std::size_t>(repeats));
  std::vector<std::exception_ptr> errors(rows.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t cell = next++; cell < rows.size(); cell = next++) {
      const std::size_t ri = cell / static_cast<std::size_t>(repeats);
      const int rep = static_cast<int>(cell % static_cast<std::size_t>(repeats));
      try {
        auto masked = mask_view(raw, view, rates[ri], cell_seed(config.seed, ri, rep));
        if (config.zscore) masked = masked.normalized();
        rows[cell] = {rates[ri], rep, run_pipeline(config, masked)};
      } catch (...) {
        errors[cell] = std::current_exception();
      }
    }
  };
  int n_threads = threads > 0 ? threads : static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  n_threads = std::min<int>(n_threads, static_cast<int>(rows.size()));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  write_file_atomic(config.output_dir / "grid.csv", grid_csv(rows));
  return rows;
}

std::string grid_csv(const std::vector<GridRow>& rows) {
  auto opt = [](const auto& v) { return v ? format_double(static_cast<double>(*v)) : std::string(); };
  std::ostringstream out;
  out << "rate,repeat,ari,nmi,logrank_p,neg_log10_p,enriched_count,final_loss,iterations,status\n";
  for (const auto& row : rows) {
    const auto& e = row.report.evaluation;
    out << format_double(row.rate) << ',' << row.repeat << ',' << opt(e.ari) << ',' << opt(e.nmi) << ','
        << opt(e.logrank_p) << ',' << opt(e.neg_log10_p) << ','
        << (e.enriched_count ? std::to_string(*e.enriched_count) : std::string()) << ','
        << (row.report.loss_trace.empty() ? std::string() : format_double(row.report.loss_trace.back())) << ','
        << row.report.iterations << ',' << row.report.status << '\n';
  }
  return out.str();
}

SyntheticData cmd_generate(const SyntheticSpec& spec, const fs::path& out_dir) {
  auto data = generate_synthetic(spec);
  RunConfig run;
  run.n_clusters = spec.n_clusters;
  run.seed = spec.seed;
  run.output_dir = "fit";
  run.labels = "labels.csv";
  for (const auto& v : data.dataset.views()) {
    const auto file = v.name + ".csv";
    write_view(out_dir / file, v);
    run.views.push_back({v.name, file, false});
  }
  write_file_atomic(out_dir / "labels.csv", labels_csv(data.dataset.global_ids(), data.labels, "label"));
  write_file_atomic(out_dir / "run.ini", config_ini(run));
  return data;
}

ClusterAssignment read_assignment(const fs::path& path) {
  ClusterAssignment a;
  int max_label = -1;
  for (auto& [id, label] : read_labels(path)) {
    if (label < 0) raise(ErrorCode::ParseError, "negative cluster label for " + id);
    a.global_ids.push_back(id);
    a.labels.push_back(label);
    max_label = std::max(max_label, label);
  }
  a.k = max_label + 1;
  return a;
}

EvaluationReport cmd_evaluate(const fs::path& assignment, const RunConfig& sources,
                              const std::optional<fs::path>& out_file) {
  for (const auto* p : {&sources.survival, &sources.clinical, &sources.labels}) {
    if (*p && !fs::exists(**p)) raise(ErrorCode::MissingFile, "file not found: " + (*p)->string());
  }
  const auto a = read_assignment(assignment);
  const auto report = evaluate_assignment(a, sources);
  if (out_file) write_file_atomic(*out_file, to_json(report).dump(2) + "\n");
  return report;
}

}  // namespace mlmf
