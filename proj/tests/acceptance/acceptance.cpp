// Runs every acceptance criterion and prints one PASS/FAIL line each.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "mlmf/evaluation.hpp"
#include "mlmf/pipeline.hpp"
#include "test_support.hpp"

using namespace mlmf;
using testing_support::gaussian;
using testing_support::uniform;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- 1 -----------------------------------------------------------------

Outcome linear_descent() {
  double worst_rise = -1e300, slowest = 0.0;
  int bad = 0;
  for (int inst = 0; inst < 20; ++inst) {
    std::mt19937_64 rng(1000 + inst);
    const Index views = 2 + inst % 2;
    const Index d = (inst / 2) % 2 ? 50 : 20;
    const Index n = (inst / 4) % 2 ? 60 : 30;
    const bool deep = (inst / 8) % 2;
    const auto ds = testing_support::random_dataset(rng, n, std::vector<Index>(views, d), 0.7);
    SolverConfig cfg;
    cfg.layer_sizes = deep ? std::vector<Index>{10, 4} : std::vector<Index>{5};
    cfg.max_iters = 200;
    cfg.tol = 0.0;
    cfg.seed = inst;
    const auto t0 = Clock::now();
    const auto fit = fit_linear(ds, cfg);
    const double secs = seconds_since(t0);
    slowest = std::max(slowest, secs);
    double rise = -1e300;
    for (std::size_t i = 1; i < fit.loss_trace.size(); ++i) rise = std::max(rise, fit.loss_trace[i] - fit.loss_trace[i - 1]);
    worst_rise = std::max(worst_rise, rise);
    if (rise > 1e-6 || secs >= 30.0 || fit.loss_trace.size() != 201) ++bad;
  }
  return {bad == 0, fmt("largest per-cycle change %.3e (slack 1e-6), slowest 200 cycles %.2f s, failing instances %d/20",
                        worst_rise, slowest, bad)};
}

// ---- 2 -----------------------------------------------------------------

Outcome consensus_oracle() {
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    std::mt19937_64 rng(2000 + inst);
    const Index n = 6 + inst % 7;
    const auto ds = testing_support::random_dataset(rng, n, std::vector<Index>(2 + inst % 2, 3), 0.6);
    const auto g = ds.indicators();
    std::vector<FactorStack> stacks(ds.view_count());
    for (std::size_t v = 0; v < stacks.size(); ++v) {
      stacks[v].bases = {MatrixXd::Zero(3, 3)};
      stacks[v].latents = {uniform(3, ds.views()[v].samples(), rng)};
    }
    const MatrixXd h = update_consensus(stacks, g);
    for (Index j = 0; j < n; ++j) {
      // normal equations of min_h sum_v ||a_v - h||^2 over covering views
      MatrixXd normal = MatrixXd::Zero(3, 3);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(3);
      for (std::size_t v = 0; v < stacks.size(); ++v) {
        const auto& pos = g[v].positions();
        for (std::size_t c = 0; c < pos.size(); ++c) {
          if (pos[c] != j) continue;
          normal += MatrixXd::Identity(3, 3);
          rhs += stacks[v].deepest().col(static_cast<Index>(c));
        }
      }
      const Eigen::VectorXd oracle = normal.ldlt().solve(rhs);
      worst = std::max(worst, (h.col(j) - oracle).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-8, fmt("max deviation from per-column normal equations %.3e over 50 instances (tol 1e-8)", worst)};
}

// ---- 3 -----------------------------------------------------------------

MatrixXd central_difference(const std::function<double()>& loss, MatrixXd& p, double eps) {
  MatrixXd out(p.rows(), p.cols());
  for (Index i = 0; i < p.size(); ++i) {
    const double keep = p.data()[i];
    p.data()[i] = keep + eps;
    const double up = loss();
    p.data()[i] = keep - eps;
    const double down = loss();
    p.data()[i] = keep;
    out.data()[i] = (up - down) / (2.0 * eps);
  }
  return out;
}

Outcome gradient_oracle() {
  double worst = 0.0;
  std::mt19937_64 rng(3000);
  for (auto act : {Activation::Sigmoid, Activation::Softplus, Activation::Relu}) {
    for (int point = 0; point < 5; ++point) {
      const auto ids = testing_support::sample_ids(4);
      std::vector<FactorStack> stacks;
      MultiOmicsDataset ds;
      double margin = 0.0;
      do {
        ds = MultiOmicsDataset({OmicsView{"a", gaussian(5, 4, rng), ids, {}},
                                OmicsView{"b", gaussian(5, 3, rng), {ids[0], ids[1], ids[3]}, {}}},
                               ids);
        stacks.clear();
        margin = 1e300;
        for (const auto& v : ds.views()) {
          FactorStack s;
          s.bases = {gaussian(5, 3, rng), gaussian(3, 2, rng)};
          s.latents = {MatrixXd::Zero(3, v.samples()), uniform(2, v.samples(), rng, 0.1, 1.0)};
          margin = std::min(margin, (s.bases[1] * s.deepest()).cwiseAbs().minCoeff());
          stacks.push_back(s);
        }
      } while (act == Activation::Relu && margin < 1e-2);  // keep away from the kink
      ConsensusEmbedding h{uniform(2, 4, rng), ids};
      const auto g = ds.indicators();
      NonlinearSolverConfig cfg;
      cfg.activation = act;
      const auto grad = gradients(stacks, h, ds, g, cfg);
      auto loss = [&] { return nonlinear_loss(stacks, h, ds, g, cfg); };
      auto rel = [](const MatrixXd& a, const MatrixXd& fd) { return (a - fd).norm() / std::max(fd.norm(), 1e-12); };
      for (std::size_t v = 0; v < 2; ++v) {
        for (std::size_t i = 0; i < 2; ++i)
          worst = std::max(worst, rel(grad.views[v].bases[i], central_difference(loss, stacks[v].bases[i], 1e-5)));
        worst = std::max(worst, rel(grad.views[v].deepest, central_difference(loss, stacks[v].deepest(), 1e-5)));
      }
      worst = std::max(worst, rel(grad.consensus, central_difference(loss, h.values, 1e-5)));
    }
  }
  return {worst < 1e-4, fmt("max relative error %.3e over 5 points x 3 activations (tol 1e-4)", worst)};
}

// ---- 4 -----------------------------------------------------------------

SyntheticSpec criterion_six_spec(std::uint64_t seed) {
  SyntheticSpec spec;  // 3 x 50 samples, dims 100 / 80, sigma 0.1, separation 5 sigma
  spec.seed = seed;
  return spec;
}

Outcome nonlinear_monotone() {
  int underflow = 0, nonmonotone = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto data = generate_synthetic(criterion_six_spec(seed));
    NonlinearSolverConfig cfg;
    cfg.layer_sizes = {32, 3};
    cfg.seed = seed;
    const auto fit = fit_nonlinear(data.dataset.normalized(), cfg);
    for (std::size_t i = 1; i < fit.loss_trace.size(); ++i)
      if (!(fit.loss_trace[i] < fit.loss_trace[i - 1])) {
        ++nonmonotone;
        break;
      }
    underflow += fit.status == FitStatus::StepUnderflow;
  }
  return {nonmonotone == 0 && underflow <= 2,
          fmt("non-monotone traces %d/20, StepUnderflow %d/20 (allowed 2)", nonmonotone, underflow)};
}

// ---- 5 -----------------------------------------------------------------

Outcome reduction() {
  std::mt19937_64 rng(5000);
  OmicsView v{"x", gaussian(30, 40, rng), testing_support::sample_ids(40), {}};
  const MultiOmicsDataset single({v});
  SolverConfig cfg;
  cfg.lambda1 = cfg.lambda2 = 0.0;
  cfg.layer_sizes = {5};
  cfg.seed = 11;
  const auto fit = fit_linear(single, cfg);
  const auto ref = semi_nmf(v.matrix, 5, {cfg.pretrain_iters, cfg.tol, cfg.seed});
  const double semi = ref.loss_trace.back() * ref.loss_trace.back();
  const double gap = std::abs(fit.loss_trace.back() - semi) / semi;

  const auto full = testing_support::random_dataset(rng, 40, {25, 20}, 1.0);
  SolverConfig two;
  two.layer_sizes = {8, 3};
  two.max_iters = 100;
  two.tol = 0.0;
  const auto a = fit_linear(full, two);
  two.dense_indicators = true;
  const auto b = fit_linear(full, two);
  double diff = a.loss_trace.size() == b.loss_trace.size() ? 0.0 : 1e300;
  for (std::size_t i = 0; i < std::min(a.loss_trace.size(), b.loss_trace.size()); ++i)
    diff = std::max(diff, std::abs(a.loss_trace[i] - b.loss_trace[i]) / std::max(1.0, std::abs(a.loss_trace[i])));
  return {gap <= 0.01 && diff <= 1e-10,
          fmt("single-view gap to Semi-NMF %.3e (tol 1e-2), identity vs dense selector trace diff %.3e (tol 1e-10)", gap,
              diff)};
}

// ---- 6 -----------------------------------------------------------------

Outcome synthetic_recovery() {
  int lin_ok = 0, non_ok = 0;
  double slowest = 0.0, lin_min = 1.0, non_min = 1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto data = generate_synthetic(criterion_six_spec(seed));
    for (auto mode : {SolverMode::Linear, SolverMode::Nonlinear}) {
      RunConfig rc;
      rc.mode = mode;
      rc.seed = seed;
      const auto t0 = Clock::now();
      const auto report = run_pipeline(rc, data.dataset.normalized());
      const double secs = seconds_since(t0);
      slowest = std::max(slowest, secs);
      const double ari = adjusted_rand_index(report.assignment.labels, data.labels);
      if (mode == SolverMode::Linear) {
        lin_ok += ari >= 0.9 && secs < 60.0;
        lin_min = std::min(lin_min, ari);
      } else {
        non_ok += ari >= 0.85 && secs < 60.0;
        non_min = std::min(non_min, ari);
      }
    }
  }
  return {lin_ok >= 8 && non_ok >= 8,
          fmt("linear ARI>=0.9 on %d/10 (min %.3f), nonlinear ARI>=0.85 on %d/10 (min %.3f), slowest run %.1f s", lin_ok,
              lin_min, non_ok, non_min, slowest)};
}

// ---- 7 -----------------------------------------------------------------

Outcome missing_degradation() {
  const auto dir = testing_support::scratch_dir("acceptance_missing");
  cmd_generate(criterion_six_spec(0), dir);
  auto rc = load_config(dir / "run.ini");
  rc.output_dir = dir / "grid";
  const auto rows = cmd_simulate_missing(rc, "view1", kDefaultMissingRates, 5);
  // Sum each rate's scores in sorted order so equal multisets give equal means.
  std::vector<double> mean(kDefaultMissingRates.size(), 0.0);
  for (std::size_t r = 0; r < mean.size(); ++r) {
    std::vector<double> ari;
    for (std::size_t i = 5 * r; i < 5 * r + 5 && i < rows.size(); ++i)
      ari.push_back(rows[i].report.evaluation.ari.value_or(-1.0));
    std::sort(ari.begin(), ari.end());
    mean[r] = std::accumulate(ari.begin(), ari.end(), 0.0) / 5.0;
  }
  bool monotone = true;
  for (std::size_t r = 1; r < mean.size(); ++r) monotone = monotone && mean[r] <= mean[r - 1];
  return {monotone && mean[1] >= 0.8 && rows.size() == 20,
          fmt("mean ARI at rates 0.1/0.3/0.5/0.7: %.4f / %.4f / %.4f / %.4f (non-increasing, rate 0.3 >= 0.8)", mean[0],
              mean[1], mean[2], mean[3])};
}

// ---- 8 -----------------------------------------------------------------

Outcome spectral_correctness() {
  std::mt19937_64 rng(8000);
  int exact = 0, multiplicity_ok = 0, bounds_ok = 0;
  double lo = 1e300, hi = -1e300;
  for (int g = 0; g < 20; ++g) {
    // two far-apart point clouds
    const Index na = 5 + g % 6, nb = 4 + g % 5;
    ConsensusEmbedding h{MatrixXd(3, na + nb), {}};
    h.values.leftCols(na) = gaussian(3, na, rng, 0.1);
    h.values.rightCols(nb) = gaussian(3, nb, rng, 0.1).array() + 100.0;
    SpectralOptions opts;
    opts.k_neighbors = 2;
    const auto a = spectral_cluster(h, 2, opts);
    std::vector<int> truth(static_cast<std::size_t>(na), 0);
    truth.resize(static_cast<std::size_t>(na + nb), 1);
    exact += a.labels == truth;

    // random graph with a planted number of components
    std::uniform_int_distribution<int> comps(1, 4), size(2, 7);
    const int c = comps(rng);
    std::vector<Index> sizes;
    for (int i = 0; i < c; ++i) sizes.push_back(size(rng));
    const Index n = std::accumulate(sizes.begin(), sizes.end(), Index{0});
    MatrixXd w = MatrixXd::Zero(n, n);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Index off = 0;
    for (Index s : sizes) {
      for (Index i = 1; i < s; ++i) w(off + i, off + i - 1) = w(off + i - 1, off + i) = u(rng);  // spanning path
      for (Index i = 0; i < s; ++i)
        for (Index j = i + 2; j < s; ++j)
          if (u(rng) < 0.5) w(off + i, off + j) = w(off + j, off + i) = u(rng);
      off += s;
    }
    const auto e = spectral_embed(normalized_laplacian(w), n, false);
    multiplicity_ok += (e.values.array().abs() < 1e-8).count() == c;
    lo = std::min(lo, e.values.minCoeff());
    hi = std::max(hi, e.values.maxCoeff());
    bounds_ok += e.values.minCoeff() >= -1e-10 && e.values.maxCoeff() <= 2.0 + 1e-10;
  }
  return {exact == 20 && multiplicity_ok == 20 && bounds_ok == 20,
          fmt("two-component recovery %d/20, zero-eigenvalue multiplicity %d/20, eigenvalues in [%.2e, %.6f]", exact,
              multiplicity_ok, lo, hi)};
}

// ---- 9 -----------------------------------------------------------------

std::vector<SurvivalRecord> records(const std::vector<double>& t) {
  std::vector<SurvivalRecord> out;
  for (std::size_t i = 0; i < t.size(); ++i) out.push_back({"s" + std::to_string(i), t[i], true});
  return out;
}

Outcome logrank_oracle() {
  // observed/expected walk over the distinct event times of A = {6,6,7,9}, B = {10,12,12,15}
  const std::vector<double> ta{6, 6, 7, 9}, tb{10, 12, 12, 15};
  std::set<double> times(ta.begin(), ta.end());
  times.insert(tb.begin(), tb.end());
  double o = 0, e = 0, var = 0;
  for (double t : times) {
    double na = 0, nb = 0, da = 0, db = 0;
    for (double x : ta) na += x >= t, da += x == t;
    for (double x : tb) nb += x >= t, db += x == t;
    const double n = na + nb, d = da + db;
    o += da;
    e += d * na / n;
    if (n > 1) var += d * (na / n) * (nb / n) * (n - d) / (n - 1);
  }
  const double oracle_p = std::erfc(std::sqrt((o - e) * (o - e) / var / 2.0));
  std::vector<double> all(ta);
  all.insert(all.end(), tb.begin(), tb.end());
  const double p = logrank_test(records(all), {0, 0, 0, 0, 1, 1, 1, 1}).p_value;

  std::mt19937_64 rng(9000);
  std::exponential_distribution<double> expo(1.0 / 500.0);
  int small = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> t;
    std::vector<int> lab;
    for (int i = 0; i < 60; ++i) {
      t.push_back(expo(rng));
      lab.push_back(i % 3);
    }
    small += logrank_test(records(t), lab).p_value < 0.05;
  }
  const double same = logrank_test(records({3, 5, 8, 3, 5, 8}), {0, 0, 0, 1, 1, 1}).p_value;
  return {std::abs(p - oracle_p) <= 1e-6 && small <= 12 && same == 1.0,
          fmt("hand example p=%.9f vs oracle %.9f, null fraction p<0.05 = %.2f (max 0.12), identical groups p=%.3f", p,
              oracle_p, small / 100.0, same)};
}

// ---- 10 ----------------------------------------------------------------

Outcome enrichment_counting() {
  ClusterAssignment a;
  ClinicalTable aligned, independent;
  for (int i = 0; i < 90; ++i) {
    const std::string id = "p" + std::to_string(i);
    a.global_ids.push_back(id);
    a.labels.push_back(i / 30);
    aligned.rows[id]["pathologic_stage"] = "stage" + std::to_string(i / 30);
    independent.rows[id]["gender"] = i % 2 ? "male" : "female";
  }
  a.k = 3;
  const auto ra = enrichment_analysis(aligned, a);
  const auto ri = enrichment_analysis(independent, a);
  double p_aligned = 1.0;
  ParameterTest gender;
  for (const auto& t : ra.tests)
    if (t.parameter == "pathologic_stage") p_aligned = t.p_value;
  for (const auto& t : ri.tests)
    if (t.parameter == "gender") gender = t;

  std::mt19937_64 rng(10000);
  bool in_range = true;
  for (int trial = 0; trial < 50; ++trial) {
    ClinicalTable t;
    ClusterAssignment b;
    std::uniform_int_distribution<int> lab(0, 2), cat(0, 3);
    std::uniform_real_distribution<double> age(20, 90);
    for (int i = 0; i < 60; ++i) {
      const std::string id = "q" + std::to_string(i);
      b.global_ids.push_back(id);
      const int l = trial % 2 ? lab(rng) : i % 3;
      b.labels.push_back(l);
      for (const char* p : kClinicalParameters)
        t.rows[id][p] = std::string(p) == "age_at_diagnosis" ? std::to_string(age(rng) + 20 * l * (trial % 3 == 0))
                                                            : "c" + std::to_string(trial % 4 == 0 ? l : cat(rng));
    }
    b.k = 3;
    const int count = enrichment_analysis(t, b).enriched_count;
    in_range = in_range && count >= 0 && count <= 6;
  }
  const bool pass = p_aligned < 1e-6 && ra.enriched_count == 1 && gender.statistic == 0.0 && gender.p_value == 1.0 &&
                    ri.enriched_count == 0 && in_range;
  return {pass, fmt("aligned p=%.3e (count %d), independent statistic %.1f p=%.3f (count %d), counts within [0,6]: %s",
                    p_aligned, ra.enriched_count, gender.statistic, gender.p_value, ri.enriched_count,
                    in_range ? "yes" : "no")};
}

// ---- 11 ----------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int shell(const std::string& args) {
  const std::string cmd = std::string(MLMF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<double> trace_values(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  std::vector<double> out;
  std::getline(in, line);
  while (std::getline(in, line)) out.push_back(std::stod(line.substr(line.find(',') + 1)));
  return out;
}

Outcome determinism() {
  const auto dir = testing_support::scratch_dir("acceptance_determinism");
  std::vector<std::string> broken;
  for (const char* run : {"g1", "g2"})
    if (shell(std::string("generate --seed 21 -o ") + (dir / run).string()) != 0) broken.push_back("generate exit");
  for (const char* f : {"view1.csv", "view2.csv", "labels.csv", "run.ini"})
    if (slurp(dir / "g1" / f) != slurp(dir / "g2" / f)) broken.push_back(std::string("generate ") + f);

  const auto cfg = (dir / "g1" / "run.ini").string();
  double worst = 0.0;
  for (const char* mode : {"linear", "nonlinear"}) {
    for (const char* run : {"a", "b"}) {
      const auto out = dir / (std::string(mode) + run);
      if (shell("fit -c " + cfg + " --mode " + mode + " --seed 5 -o " + out.string()) != 0)
        broken.push_back(std::string("fit exit ") + mode);
    }
    const auto a = dir / (std::string(mode) + "a"), b = dir / (std::string(mode) + "b");
    if (slurp(a / "assignment.csv") != slurp(b / "assignment.csv")) broken.push_back(std::string("labels ") + mode);
    const auto ta = trace_values(a / "loss_trace.csv"), tb = trace_values(b / "loss_trace.csv");
    if (ta.size() != tb.size() || ta.empty()) broken.push_back(std::string("trace length ") + mode);
    for (std::size_t i = 0; i < std::min(ta.size(), tb.size()); ++i) worst = std::max(worst, std::abs(ta[i] - tb[i]));

    for (const char* run : {"a", "b"}) {
      const auto eval = dir / (std::string("eval_") + mode + run + ".json");
      shell("evaluate " + (a / "assignment.csv").string() + " --labels " + (dir / "g1" / "labels.csv").string() +
            " -o " + eval.string());
    }
    if (slurp(dir / (std::string("eval_") + mode + "a.json")) != slurp(dir / (std::string("eval_") + mode + "b.json")))
      broken.push_back(std::string("evaluate ") + mode);
  }
  for (const char* run : {"sa", "sb"})
    if (shell("simulate-missing -c " + cfg + " --seed 5 --mask-view view1 --rates 0.3,0.6 --repeats 2 -o " +
              (dir / run).string()) != 0)
      broken.push_back("simulate exit");
  if (slurp(dir / "sa" / "grid.csv") != slurp(dir / "sb" / "grid.csv")) broken.push_back("grid");
  if (worst > 1e-8) broken.push_back("trace values");

  std::string what;
  for (const auto& b : broken) what += " " + b;
  return {broken.empty(), fmt("generate/fit (both modes)/evaluate/simulate-missing repeated: max trace diff %.1e%s%s",
                              worst, broken.empty() ? "" : ", mismatches:", what.c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"linear solver descent", linear_descent},
      {"consensus closed form", consensus_oracle},
      {"nonlinear gradient oracle", gradient_oracle},
      {"nonlinear monotonicity", nonlinear_monotone},
      {"reduction equivalence", reduction},
      {"synthetic recovery", synthetic_recovery},
      {"missing-data degradation", missing_degradation},
      {"spectral correctness", spectral_correctness},
      {"logrank oracle", logrank_oracle},
      {"enrichment counting", enrichment_counting},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %-26s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
