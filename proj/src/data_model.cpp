#include "mlmf/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mlmf/error.hpp"

namespace mlmf {

namespace {

void check_unique(const std::vector<std::string>& ids, const std::string& what) {
  std::unordered_set<std::string> seen;
  seen.reserve(ids.size());
  for (const auto& id : ids) {
    if (!seen.insert(id).second) raise(ErrorCode::DuplicateSample, "'" + id + "' repeated in " + what);
  }
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(delim, start);
    out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

bool operator==(const OmicsView& a, const OmicsView& b) {
  return a.name == b.name && a.sample_ids == b.sample_ids && a.feature_ids == b.feature_ids &&
         a.matrix.rows() == b.matrix.rows() && a.matrix.cols() == b.matrix.cols() &&
         a.matrix == b.matrix;
}

void OmicsView::validate() const {
  if (matrix.cols() != static_cast<Index>(sample_ids.size())) {
    raise(ErrorCode::ShapeMismatch, "view '" + name + "' has " + std::to_string(matrix.cols()) +
                                        " columns but " + std::to_string(sample_ids.size()) + " sample ids");
  }
  if (!feature_ids.empty() && matrix.rows() != static_cast<Index>(feature_ids.size())) {
    raise(ErrorCode::ShapeMismatch, "view '" + name + "' feature id count does not match rows");
  }
  check_unique(sample_ids, "view '" + name + "'");
  if (!matrix.allFinite()) raise(ErrorCode::NonFiniteInput, "view '" + name + "' contains NaN or Inf");
}

// ---- IndicatorMatrix ----------------------------------------------------

IndicatorMatrix::IndicatorMatrix(std::string view_name, Index global_size, std::vector<Index> positions)
    : view_name_(std::move(view_name)), global_size_(global_size), positions_(std::move(positions)) {}

bool IndicatorMatrix::is_identity() const {
  if (view_size() != global_size_) return false;
  for (Index j = 0; j < view_size(); ++j) {
    if (positions_[j] != j) return false;
  }
  return true;
}

MatrixXd IndicatorMatrix::dense() const {
  MatrixXd g = MatrixXd::Zero(global_size_, view_size());
  for (Index j = 0; j < view_size(); ++j) g(positions_[j], j) = 1.0;
  return g;
}

MatrixXd IndicatorMatrix::select(const MatrixXd& consensus) const {
  if (consensus.cols() != global_size_) raise(ErrorCode::ShapeMismatch, "consensus width differs from indicator");
  MatrixXd out(consensus.rows(), view_size());
  for (Index j = 0; j < view_size(); ++j) out.col(j) = consensus.col(positions_[j]);
  return out;
}

MatrixXd IndicatorMatrix::scatter(const MatrixXd& latent) const {
  if (latent.cols() != view_size()) raise(ErrorCode::ShapeMismatch, "latent width differs from indicator");
  MatrixXd out = MatrixXd::Zero(latent.rows(), global_size_);
  for (Index j = 0; j < view_size(); ++j) out.col(positions_[j]) = latent.col(j);
  return out;
}

IndicatorMatrix build_indicator(const std::vector<std::string>& view_ids,
                                const std::vector<std::string>& global_ids, std::string view_name) {
  check_unique(global_ids, "global ids");
  check_unique(view_ids, "view ids");
  std::unordered_map<std::string, Index> slot;
  slot.reserve(global_ids.size());
  for (std::size_t i = 0; i < global_ids.size(); ++i) slot.emplace(global_ids[i], static_cast<Index>(i));
  std::vector<Index> positions;
  positions.reserve(view_ids.size());
  for (const auto& id : view_ids) {
    auto it = slot.find(id);
    if (it == slot.end()) raise(ErrorCode::UnknownSample, "'" + id + "' is not a global sample");
    positions.push_back(it->second);
  }
  return IndicatorMatrix(std::move(view_name), static_cast<Index>(global_ids.size()), std::move(positions));
}

// ---- MultiOmicsDataset --------------------------------------------------

MultiOmicsDataset::MultiOmicsDataset(std::vector<OmicsView> views) : views_(std::move(views)) {
  std::unordered_set<std::string> seen;
  for (const auto& v : views_) {
    for (const auto& id : v.sample_ids) {
      if (seen.insert(id).second) global_ids_.push_back(id);
    }
  }
  validate();
}

MultiOmicsDataset::MultiOmicsDataset(std::vector<OmicsView> views, std::vector<std::string> global_ids)
    : views_(std::move(views)), global_ids_(std::move(global_ids)) {
  validate();
}

void MultiOmicsDataset::validate() const {
  if (views_.empty()) raise(ErrorCode::DegenerateShape, "dataset needs at least one view");
  check_unique(global_ids_, "global ids");
  std::unordered_set<std::string> names;
  for (const auto& v : views_) {
    if (!names.insert(v.name).second) raise(ErrorCode::BadConfig, "view name '" + v.name + "' repeated");
    v.validate();
  }
  auto cov = coverage();  // throws UnknownSample for stray view ids
  for (Index i = 0; i < cov.size(); ++i) {
    if (cov(i) == 0) raise(ErrorCode::OrphanedSample, "'" + global_ids_[i] + "' is present in no view");
  }
}

const OmicsView& MultiOmicsDataset::view(const std::string& name) const { return views_[view_index(name)]; }

std::size_t MultiOmicsDataset::view_index(const std::string& name) const {
  for (std::size_t v = 0; v < views_.size(); ++v) {
    if (views_[v].name == name) return v;
  }
  raise(ErrorCode::UnknownView, "no view named '" + name + "'");
}

std::vector<IndicatorMatrix> MultiOmicsDataset::indicators() const {
  std::vector<IndicatorMatrix> out;
  out.reserve(views_.size());
  for (const auto& v : views_) out.push_back(build_indicator(v.sample_ids, global_ids_, v.name));
  return out;
}

Eigen::VectorXi MultiOmicsDataset::coverage() const {
  Eigen::VectorXi count = Eigen::VectorXi::Zero(size());
  for (const auto& g : indicators()) {
    for (Index p : g.positions()) ++count(p);
  }
  return count;
}

MultiOmicsDataset MultiOmicsDataset::normalized() const {
  auto views = views_;
  for (auto& v : views) v.matrix = zscore_normalize(v.matrix);
  return MultiOmicsDataset(std::move(views), global_ids_);
}

// ---- preprocessing ------------------------------------------------------

MatrixXd zscore_normalize(const MatrixXd& matrix) {
  if (matrix.cols() < 2) raise(ErrorCode::DegenerateShape, "z-score needs at least two samples");
  const double n = static_cast<double>(matrix.cols());
  MatrixXd out(matrix.rows(), matrix.cols());
  for (Index r = 0; r < matrix.rows(); ++r) {
    const double mean = matrix.row(r).mean();
    const double var = (matrix.row(r).array() - mean).square().sum() / n;
    const double sd = std::sqrt(var);
    if (sd <= 1e-300 || !std::isfinite(sd)) {
      out.row(r).setZero();
    } else {
      out.row(r) = (matrix.row(r).array() - mean) / sd;
    }
  }
  return out;
}

MultiOmicsDataset mask_view(const MultiOmicsDataset& dataset, const std::string& view_name, double missing_rate,
                            std::uint64_t seed) {
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) {
    raise(ErrorCode::BadConfig, "missing rate must lie in [0, 1)");
  }
  const std::size_t target = dataset.view_index(view_name);
  const OmicsView& view = dataset.views()[target];
  const auto n_remove = static_cast<std::size_t>(std::floor(missing_rate * static_cast<double>(view.samples())));
  if (n_remove == 0) return dataset;

  std::vector<Index> order(view.samples());
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> removed(view.samples(), false);
  for (std::size_t i = 0; i < n_remove; ++i) removed[order[i]] = true;

  OmicsView masked;
  masked.name = view.name;
  masked.feature_ids = view.feature_ids;
  std::vector<Index> keep;
  for (Index j = 0; j < view.samples(); ++j) {
    if (!removed[j]) keep.push_back(j);
  }
  masked.matrix.resize(view.features(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    masked.matrix.col(static_cast<Index>(c)) = view.matrix.col(keep[c]);
    masked.sample_ids.push_back(view.sample_ids[keep[c]]);
  }

  auto views = dataset.views();
  views[target] = std::move(masked);
  // Construction rejects any sample left without a view.
  return MultiOmicsDataset(std::move(views), dataset.global_ids());
}

// ---- delimited text I/O -------------------------------------------------

char delimiter_for(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".tsv" || ext == ".txt" || ext == ".tab") return '\t';
  return ',';
}

double parse_double(const std::string& cell) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    raise(ErrorCode::ParseError, "cannot parse '" + cell + "' as a number");
  }
  return value;
}

std::size_t DelimitedTable::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) raise(ErrorCode::ParseError, "missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

DelimitedTable read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::MissingFile, "cannot open " + path.string());
  const char delim = delimiter_for(path);
  DelimitedTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto cells = split(line, delim);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      raise(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                       std::to_string(table.header.size()) + " cells, found " +
                                       std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) raise(ErrorCode::ParseError, path.string() + " is empty");
  return table;
}

OmicsView read_view(const std::filesystem::path& path, std::string name, bool samples_as_rows) {
  const auto table = read_table(path);
  const std::size_t n_cols = table.header.size() - 1;
  const std::size_t n_rows = table.rows.size();
  if (n_cols == 0 || n_rows == 0) raise(ErrorCode::DegenerateShape, path.string() + " holds no data");

  MatrixXd raw(static_cast<Index>(n_rows), static_cast<Index>(n_cols));
  std::vector<std::string> row_ids;
  row_ids.reserve(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    const auto& cells = table.rows[r];
    row_ids.push_back(cells[0]);
    for (std::size_t c = 0; c < n_cols; ++c) {
      const auto& cell = cells[c + 1];
      if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") {
        raise(ErrorCode::ParseError, path.string() + ": missing cell at row " + std::to_string(r + 2) +
                                         ", column " + std::to_string(c + 2));
      }
      raw(static_cast<Index>(r), static_cast<Index>(c)) = parse_double(cell);
    }
  }
  std::vector<std::string> col_ids(table.header.begin() + 1, table.header.end());

  OmicsView view;
  view.name = std::move(name);
  if (samples_as_rows) {
    view.matrix = raw.transpose();
    view.sample_ids = std::move(row_ids);
    view.feature_ids = std::move(col_ids);
  } else {
    view.matrix = std::move(raw);
    view.sample_ids = std::move(col_ids);
    view.feature_ids = std::move(row_ids);
  }
  view.validate();
  return view;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_view(const std::filesystem::path& path, const OmicsView& view) {
  const char delim = delimiter_for(path);
  std::ostringstream out;
  out << "feature";
  for (const auto& id : view.sample_ids) out << delim << id;
  out << '\n';
  for (Index r = 0; r < view.features(); ++r) {
    out << (view.feature_ids.empty() ? "f" + std::to_string(r) : view.feature_ids[r]);
    for (Index c = 0; c < view.samples(); ++c) out << delim << format_double(view.matrix(r, c));
    out << '\n';
  }
  write_file_atomic(path, out.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::MissingFile, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) raise(ErrorCode::MissingFile, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace mlmf
