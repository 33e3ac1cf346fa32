#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mlmf/data_model.hpp"

namespace testing_support {

using Eigen::Index;
using Eigen::MatrixXd;

inline MatrixXd gaussian(Index rows, Index cols, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> n(0.0, sd);
  MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

inline MatrixXd uniform(Index rows, Index cols, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

inline std::vector<std::string> sample_ids(Index n, const std::string& prefix = "s") {
  std::vector<std::string> ids;
  for (Index i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

// Views drawn over N global samples; every view past the first keeps a random
// subset, while the first stays complete so each sample is covered.
inline mlmf::MultiOmicsDataset random_dataset(std::mt19937_64& rng, Index n, const std::vector<Index>& dims,
                                              double keep = 1.0) {
  const auto ids = sample_ids(n);
  std::vector<mlmf::OmicsView> views;
  std::bernoulli_distribution coin(keep);
  for (std::size_t v = 0; v < dims.size(); ++v) {
    std::vector<std::string> present;
    for (Index i = 0; i < n; ++i)
      if (v == 0 || coin(rng)) present.push_back(ids[i]);
    if (present.size() < 3) present.assign(ids.begin(), ids.begin() + 3);
    mlmf::OmicsView view;
    view.name = "v" + std::to_string(v);
    view.sample_ids = present;
    view.matrix = gaussian(dims[v], static_cast<Index>(present.size()), rng);
    views.push_back(std::move(view));
  }
  return mlmf::MultiOmicsDataset(std::move(views), ids);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("mlmf_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_support
