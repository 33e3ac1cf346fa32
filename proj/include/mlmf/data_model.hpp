#pragma once

// Dataset containers, sample indicator matrices and preprocessing.
//
// Dimension conventions used throughout the library:
//   view matrix        D_v x N_v   (features x present samples)
//   indicator          N   x N_v   (global slot x view column)
//   consensus H        d   x N
//   per-view latent    d   x N_v,  so that H * G^(v) selects the view's columns.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mlmf {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct OmicsView {
  std::string name;
  MatrixXd matrix;                      // D_v x N_v
  std::vector<std::string> sample_ids;  // length N_v
  std::vector<std::string> feature_ids; // empty or length D_v

  Index features() const { return matrix.rows(); }
  Index samples() const { return matrix.cols(); }

  /// Throws DuplicateSample, ShapeMismatch or NonFiniteInput.
  void validate() const;

  friend bool operator==(const OmicsView& a, const OmicsView& b);
};

/// Binary column selector placing each of a view's N_v samples into one of
/// the N global slots. Stored as the slot index of every view column; the
/// dense N x N_v form is materialized on request.
class IndicatorMatrix {
 public:
  IndicatorMatrix() = default;
  IndicatorMatrix(std::string view_name, Index global_size, std::vector<Index> positions);

  const std::string& view_name() const { return view_name_; }
  Index global_size() const { return global_size_; }
  Index view_size() const { return static_cast<Index>(positions_.size()); }
  const std::vector<Index>& positions() const { return positions_; }

  /// True when N == N_v and column j maps to slot j.
  bool is_identity() const;

  MatrixXd dense() const;

  /// H * G for a d x N matrix H (column gather).
  MatrixXd select(const MatrixXd& consensus) const;
  /// A * G^T for a d x N_v matrix A (column scatter into N slots, zeros elsewhere).
  MatrixXd scatter(const MatrixXd& latent) const;

 private:
  std::string view_name_;
  Index global_size_ = 0;
  std::vector<Index> positions_;
};

class MultiOmicsDataset {
 public:
  MultiOmicsDataset() = default;

  /// Global ids are the union of view ids in order of first appearance.
  explicit MultiOmicsDataset(std::vector<OmicsView> views);
  /// Explicit global ordering. Every id must occur in at least one view and
  /// every view id must be a global id.
  MultiOmicsDataset(std::vector<OmicsView> views, std::vector<std::string> global_ids);

  const std::vector<OmicsView>& views() const { return views_; }
  const std::vector<std::string>& global_ids() const { return global_ids_; }
  Index size() const { return static_cast<Index>(global_ids_.size()); }
  std::size_t view_count() const { return views_.size(); }

  const OmicsView& view(const std::string& name) const;
  std::size_t view_index(const std::string& name) const;

  std::vector<IndicatorMatrix> indicators() const;

  /// Number of views containing each global sample (diagonal of sum_v G G^T).
  Eigen::VectorXi coverage() const;

  /// Copy with every view matrix z-scored per feature.
  MultiOmicsDataset normalized() const;

  friend bool operator==(const MultiOmicsDataset& a, const MultiOmicsDataset& b) {
    return a.views_ == b.views_ && a.global_ids_ == b.global_ids_;
  }

 private:
  void validate() const;

  std::vector<OmicsView> views_;
  std::vector<std::string> global_ids_;
};

IndicatorMatrix build_indicator(const std::vector<std::string>& view_ids,
                                const std::vector<std::string>& global_ids,
                                std::string view_name = {});

/// Per-row standardization with the population standard deviation. Rows with
/// zero variance become all-zero rows. Requires at least two columns.
MatrixXd zscore_normalize(const MatrixXd& matrix);

/// Deletes floor(rate * N_v) uniformly chosen samples from the named view.
MultiOmicsDataset mask_view(const MultiOmicsDataset& dataset, const std::string& view_name,
                            double missing_rate, std::uint64_t seed);

// ---- delimited text I/O -------------------------------------------------

struct DelimitedTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column position by header name; throws ParseError when absent.
  std::size_t column(const std::string& name) const;
};

/// Reads a delimited text file whose first line is a header. Every row must
/// have as many cells as the header.
DelimitedTable read_table(const std::filesystem::path& path);

double parse_double(const std::string& cell);

/// Comma for .csv, tab for .tsv/.txt/.tab.
char delimiter_for(const std::filesystem::path& path);

/// Reads a feature matrix: first row holds sample ids, first column feature
/// ids. With `samples_as_rows` the file is samples x features and is
/// transposed on load.
OmicsView read_view(const std::filesystem::path& path, std::string name,
                    bool samples_as_rows = false);

void write_view(const std::filesystem::path& path, const OmicsView& view);

/// Writes `contents` to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string format_double(double value);

}  // namespace mlmf
