#include "mlmf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <boost/math/special_functions/gamma.hpp>

#include "mlmf/error.hpp"
#include "mlmf/semi_nmf.hpp"

namespace mlmf {

double chi_square_sf(double statistic, double dof) {
  if (!(dof > 0.0) || !(statistic > 0.0)) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

// ---- survival -----------------------------------------------------------

LogrankResult logrank_test(const std::vector<SurvivalRecord>& records, const std::vector<int>& labels) {
  if (records.size() != labels.size()) raise(ErrorCode::LengthMismatch, "one label per survival record is required");

  std::vector<int> groups(labels.begin(), labels.end());
  std::sort(groups.begin(), groups.end());
  groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
  const auto g_count = groups.size();
  if (g_count < 2) raise(ErrorCode::SingleGroup, "logrank test needs at least two nonempty groups");
  std::vector<std::size_t> group_of(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    group_of[i] = static_cast<std::size_t>(std::lower_bound(groups.begin(), groups.end(), labels[i]) - groups.begin());
    if (!(records[i].time >= 0.0)) raise(ErrorCode::ParseError, "negative survival time for " + records[i].sample_id);
  }
  if (std::none_of(records.begin(), records.end(), [](const auto& r) { return r.event; })) {
    raise(ErrorCode::NoEvents, "no observed events");
  }

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return records[a].time < records[b].time; });

  const auto gi = static_cast<Index>(g_count);
  Eigen::VectorXd at_risk = Eigen::VectorXd::Zero(gi);
  for (auto g : group_of) at_risk(static_cast<Index>(g)) += 1.0;
  Eigen::VectorXd observed = Eigen::VectorXd::Zero(gi);
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(gi);
  MatrixXd variance = MatrixXd::Zero(gi, gi);

  std::size_t pos = 0;
  while (pos < order.size()) {
    const double t = records[order[pos]].time;
    Eigen::VectorXd deaths = Eigen::VectorXd::Zero(gi);
    Eigen::VectorXd leaving = Eigen::VectorXd::Zero(gi);
    std::size_t end = pos;
    for (; end < order.size() && records[order[end]].time == t; ++end) {
      const auto g = static_cast<Index>(group_of[order[end]]);
      leaving(g) += 1.0;
      if (records[order[end]].event) deaths(g) += 1.0;
    }
    const double d = deaths.sum();
    const double n = at_risk.sum();
    if (d > 0.0) {
      observed += deaths;
      expected += d * at_risk / n;
      if (n > 1.0) {
        const double scale = d * (n - d) / (n - 1.0);
        for (Index a = 0; a < gi; ++a) {
          for (Index b = 0; b < gi; ++b) {
            const double pa = at_risk(a) / n;
            const double pb = at_risk(b) / n;
            variance(a, b) += scale * pa * ((a == b ? 1.0 : 0.0) - pb);
          }
        }
      }
    }
    at_risk -= leaving;
    pos = end;
  }

  LogrankResult out;
  out.observed.assign(observed.data(), observed.data() + gi);
  out.expected.assign(expected.data(), expected.data() + gi);
  out.dof = static_cast<double>(g_count - 1);
  const Eigen::VectorXd u = (observed - expected).head(gi - 1);
  const MatrixXd v = variance.topLeftCorner(gi - 1, gi - 1);
  out.statistic = std::max(0.0, u.dot(pseudo_inverse(v) * u));
  out.p_value = chi_square_sf(out.statistic, out.dof);
  return out;
}

LogrankResult logrank_test(const std::vector<SurvivalRecord>& records, const ClusterAssignment& assignment) {
  std::unordered_map<std::string, int> label_of;
  for (std::size_t i = 0; i < assignment.global_ids.size(); ++i) label_of[assignment.global_ids[i]] = assignment.labels[i];
  std::vector<SurvivalRecord> matched;
  std::vector<int> labels;
  for (const auto& r : records) {
    auto it = label_of.find(r.sample_id);
    if (it == label_of.end()) continue;
    matched.push_back(r);
    labels.push_back(it->second);
  }
  return logrank_test(matched, labels);
}

std::vector<SurvivalRecord> read_survival(const std::filesystem::path& path) {
  const auto table = read_table(path);
  const auto id_col = table.column("sample_id");
  const auto time_col = table.column("time");
  const auto event_col = table.column("event");
  std::vector<SurvivalRecord> out;
  std::unordered_set<std::string> seen;
  for (const auto& row : table.rows) {
    SurvivalRecord r;
    r.sample_id = row[id_col];
    if (!seen.insert(r.sample_id).second) raise(ErrorCode::DuplicateSample, r.sample_id + " repeated in " + path.string());
    r.time = parse_double(row[time_col]);
    if (!(r.time >= 0.0)) raise(ErrorCode::ParseError, "negative time for " + r.sample_id);
    const auto& e = row[event_col];
    if (e == "1" || e == "true") {
      r.event = true;
    } else if (e == "0" || e == "false") {
      r.event = false;
    } else {
      raise(ErrorCode::ParseError, "event must be 0 or 1 for " + r.sample_id + ", got '" + e + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

// ---- clinical enrichment ------------------------------------------------

ClinicalTable read_clinical(const std::filesystem::path& path) {
  const auto table = read_table(path);
  const auto id_col = table.column("sample_id");
  std::vector<std::size_t> cols;
  for (const char* p : kClinicalParameters) cols.push_back(table.column(p));
  ClinicalTable out;
  for (const auto& row : table.rows) {
    auto& entry = out.rows[row[id_col]];
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (!row[cols[k]].empty() && row[cols[k]] != "NA") entry[kClinicalParameters[k]] = row[cols[k]];
    }
  }
  return out;
}

ParameterTest chi_square_independence(const std::vector<int>& labels, const std::vector<std::string>& categories) {
  if (labels.size() != categories.size()) raise(ErrorCode::LengthMismatch, "labels and categories differ in length");
  ParameterTest out;
  out.test = "chi_square";
  std::map<int, std::size_t> row_index;
  std::map<std::string, std::size_t> col_index;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (categories[i].empty()) continue;
    row_index.emplace(labels[i], 0);
    col_index.emplace(categories[i], 0);
  }
  std::size_t k = 0;
  for (auto& [_, idx] : row_index) idx = k++;
  k = 0;
  for (auto& [_, idx] : col_index) idx = k++;
  const auto r = static_cast<Index>(row_index.size());
  const auto c = static_cast<Index>(col_index.size());
  MatrixXd counts = MatrixXd::Zero(r, c);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (categories[i].empty()) continue;
    counts(static_cast<Index>(row_index[labels[i]]), static_cast<Index>(col_index[categories[i]])) += 1.0;
    ++out.samples;
  }
  if (r < 2 || c < 2) return out;

  const Eigen::VectorXd row_sum = counts.rowwise().sum();
  const Eigen::RowVectorXd col_sum = counts.colwise().sum();
  const double n = counts.sum();
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) {
      const double e = row_sum(i) * col_sum(j) / n;
      if (e < 5.0) out.small_expected_counts = true;
      const double diff = counts(i, j) - e;
      out.statistic += diff * diff / e;
    }
  }
  out.dof = static_cast<double>((r - 1) * (c - 1));
  out.p_value = chi_square_sf(out.statistic, out.dof);
  return out;
}

ParameterTest kruskal_wallis(const std::vector<int>& labels, const std::vector<double>& values) {
  if (labels.size() != values.size()) raise(ErrorCode::LengthMismatch, "labels and values differ in length");
  ParameterTest out;
  out.test = "kruskal_wallis";
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isfinite(values[i])) idx.push_back(i);
  }
  out.samples = idx.size();
  std::set<int> present;
  for (auto i : idx) present.insert(labels[i]);
  if (present.size() < 2 || idx.size() < 3) return out;

  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  const double n = static_cast<double>(idx.size());
  std::map<int, double> rank_sum;
  std::map<int, double> group_n;
  double tie_term = 0.0;
  for (std::size_t pos = 0; pos < idx.size();) {
    std::size_t end = pos;
    while (end < idx.size() && values[idx[end]] == values[idx[pos]]) ++end;
    const double avg_rank = 0.5 * static_cast<double>(pos + 1 + end);
    const double t = static_cast<double>(end - pos);
    tie_term += t * t * t - t;
    for (std::size_t q = pos; q < end; ++q) {
      rank_sum[labels[idx[q]]] += avg_rank;
      group_n[labels[idx[q]]] += 1.0;
    }
    pos = end;
  }
  double h = 0.0;
  for (const auto& [g, rs] : rank_sum) h += rs * rs / group_n[g];
  h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
  const double correction = 1.0 - tie_term / (n * n * n - n);
  if (correction <= 0.0) return out;  // every value tied
  out.statistic = std::max(0.0, h / correction);
  out.dof = static_cast<double>(present.size() - 1);
  out.p_value = chi_square_sf(out.statistic, out.dof);
  return out;
}

EnrichmentResult enrichment_analysis(const ClinicalTable& clinical, const ClusterAssignment& assignment) {
  std::set<int> clusters(assignment.labels.begin(), assignment.labels.end());
  if (clusters.size() < 2) raise(ErrorCode::SingleGroup, "enrichment needs at least two clusters");

  EnrichmentResult out;
  for (const char* parameter : kClinicalParameters) {
    const std::string name = parameter;
    const bool numeric = name == "age_at_diagnosis";
    std::vector<int> labels;
    std::vector<std::string> categories;
    std::vector<double> values;
    for (std::size_t i = 0; i < assignment.global_ids.size(); ++i) {
      auto row = clinical.rows.find(assignment.global_ids[i]);
      if (row == clinical.rows.end()) continue;
      auto cell = row->second.find(name);
      if (cell == row->second.end() || cell->second.empty()) continue;
      labels.push_back(assignment.labels[i]);
      if (numeric) {
        values.push_back(parse_double(cell->second));
      } else {
        categories.push_back(cell->second);
      }
    }
    ParameterTest test = numeric ? kruskal_wallis(labels, values) : chi_square_independence(labels, categories);
    test.parameter = name;
    if (test.samples == 0) out.warnings.push_back("AllMissing: " + name + " has no values; reported as p = 1");
    if (test.small_expected_counts) out.warnings.push_back(name + ": expected cell counts below 5");
    if (test.p_value < kSignificanceLevel) ++out.enriched_count;
    out.tests.push_back(std::move(test));
  }
  return out;
}

// ---- partition agreement ------------------------------------------------

namespace {

struct Contingency {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> a;
  std::map<int, double> b;
  double n = 0.0;
};

Contingency contingency(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) raise(ErrorCode::LengthMismatch, "labelings differ in length");
  Contingency c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    c.joint[{a[i], b[i]}] += 1.0;
    c.a[a[i]] += 1.0;
    c.b[b[i]] += 1.0;
  }
  c.n = static_cast<double>(a.size());
  return c;
}

double pairs(double x) { return 0.5 * x * (x - 1.0); }

}  // namespace

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  const auto c = contingency(a, b);
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [_, v] : c.joint) index += pairs(v);
  for (const auto& [_, v] : c.a) sum_a += pairs(v);
  for (const auto& [_, v] : c.b) sum_b += pairs(v);
  const double total = pairs(c.n);
  if (total == 0.0) return 1.0;
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

double normalized_mutual_information(const std::vector<int>& a, const std::vector<int>& b) {
  const auto c = contingency(a, b);
  if (c.n == 0.0) return 1.0;
  auto entropy = [&](const std::map<int, double>& m) {
    double h = 0.0;
    for (const auto& [_, v] : m) h -= (v / c.n) * std::log(v / c.n);
    return h;
  };
  const double ha = entropy(c.a);
  const double hb = entropy(c.b);
  if (ha == 0.0 && hb == 0.0) return 1.0;
  double mi = 0.0;
  for (const auto& [key, v] : c.joint) {
    mi += (v / c.n) * std::log(v * c.n / (c.a.at(key.first) * c.b.at(key.second)));
  }
  return std::clamp(mi / (0.5 * (ha + hb)), 0.0, 1.0);
}

// ---- synthetic data -----------------------------------------------------

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_clusters < 1 || spec.samples_per_cluster < 1 || spec.views.empty() || spec.latent_dim < 1) {
    raise(ErrorCode::BadConfig, "synthetic cluster, sample, view and latent counts must be positive");
  }
  for (const auto& v : spec.views) {
    if (v.dim < 1 || !(v.noise_sigma >= 0.0)) raise(ErrorCode::BadConfig, "view dims > 0 and noise >= 0 required");
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](Index rows, Index cols) {
    MatrixXd m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
    }
    return m;
  };

  const int k = spec.n_clusters;
  const Index n = static_cast<Index>(k) * spec.samples_per_cluster;
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) labels[i] = static_cast<int>(i / spec.samples_per_cluster);
  std::shuffle(labels.begin(), labels.end(), rng);

  const MatrixXd centers = draw(spec.latent_dim, k);
  const int width = static_cast<int>(std::to_string(n).size());
  std::vector<std::string> ids;
  for (Index i = 0; i < n; ++i) {
    std::ostringstream id;
    id << 's';
    id.width(width);
    id.fill('0');
    id << i;
    ids.push_back(id.str());
  }

  std::vector<OmicsView> views;
  for (std::size_t v = 0; v < spec.views.size(); ++v) {
    const auto& vs = spec.views[v];
    const MatrixXd map = draw(vs.dim, spec.latent_dim) / std::sqrt(static_cast<double>(spec.latent_dim));
    MatrixXd means = map * centers;
    if (k > 1) {
      double closest = std::numeric_limits<double>::infinity();
      for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) closest = std::min(closest, (means.col(a) - means.col(b)).norm());
      }
      if (closest > 0.0) means *= spec.separation * std::sqrt(static_cast<double>(vs.dim)) / closest;
    }
    OmicsView view;
    view.name = "view" + std::to_string(v + 1);
    view.sample_ids = ids;
    view.matrix = draw(vs.dim, n) * vs.noise_sigma;
    for (Index j = 0; j < n; ++j) view.matrix.col(j) += means.col(labels[j]);
    for (Index f = 0; f < vs.dim; ++f) view.feature_ids.push_back(view.name + "_f" + std::to_string(f));
    views.push_back(std::move(view));
  }
  return {MultiOmicsDataset(std::move(views), ids), std::move(labels)};
}

std::vector<std::pair<std::string, int>> read_labels(const std::filesystem::path& path) {
  const auto table = read_table(path);
  if (table.header.size() < 2) raise(ErrorCode::ParseError, path.string() + " needs two columns");
  std::vector<std::pair<std::string, int>> out;
  for (const auto& row : table.rows) {
    const double v = parse_double(row[1]);
    if (v != std::floor(v)) raise(ErrorCode::ParseError, "non-integer label '" + row[1] + "'");
    out.emplace_back(row[0], static_cast<int>(v));
  }
  return out;
}

std::string labels_csv(const std::vector<std::string>& ids, const std::vector<int>& labels, const std::string& column) {
  std::ostringstream out;
  out << "sample_id," << column << '\n';
  for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ',' << labels[i] << '\n';
  return out.str();
}

}  // namespace mlmf
