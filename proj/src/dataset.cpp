#include "fairicp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "fairicp/errors.hpp"
#include "fairicp/rng.hpp"

namespace fairicp {

bool Dataset::any_categorical_attr() const {
  return std::any_of(a_cols.begin(), a_cols.end(),
                     [](const AttrColumn& c) { return c.categorical; });
}

void Dataset::validate() const {
  const Eigen::Index rows = Y.size();
  if (rows < 1) throw RuntimeError("dataset: empty (n must be >= 1)");
  if (X.rows() != rows || A.rows() != rows)
    throw RuntimeError("dataset: X, A, Y row counts differ");
  if (static_cast<Eigen::Index>(a_cols.size()) != A.cols())
    throw RuntimeError("dataset: attribute metadata does not match A");
  if (!X.allFinite() || !A.allFinite() || !Y.allFinite())
    throw RuntimeError("dataset: non-finite value");
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    const AttrColumn& col = a_cols[static_cast<std::size_t>(j)];
    if (!col.categorical) continue;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double v = A(i, j);
      if (v != std::floor(v) || v < 0 || v >= col.levels)
        throw RuntimeError("dataset: code out of range in attribute column '" +
                           col.name + "'");
    }
  }
  if (task == TaskKind::classification) {
    if (n_classes < 2) throw RuntimeError("dataset: classification needs >= 2 classes");
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double v = Y(i);
      if (v != std::floor(v) || v < 0 || v >= n_classes)
        throw RuntimeError("dataset: response class code out of range");
    }
  }
}

Eigen::MatrixXd expand_attributes(const Eigen::MatrixXd& A,
                                  const std::vector<AttrColumn>& cols,
                                  OneHot mode) {
  if (static_cast<Eigen::Index>(cols.size()) != A.cols())
    throw RuntimeError("expand_attributes: metadata does not match A");
  Eigen::Index out_cols = 0;
  for (const AttrColumn& c : cols) {
    if (!c.categorical)
      out_cols += 1;
    else
      out_cols += (mode == OneHot::full) ? c.levels : c.levels - 1;
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(A.rows(), out_cols);
  Eigen::Index at = 0;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    const AttrColumn& c = cols[static_cast<std::size_t>(j)];
    if (!c.categorical) {
      out.col(at++) = A.col(j);
      continue;
    }
    const int first = (mode == OneHot::full) ? 0 : 1;
    for (int level = first; level < c.levels; ++level) {
      for (Eigen::Index i = 0; i < A.rows(); ++i)
        out(i, at) = (A(i, j) == level) ? 1.0 : 0.0;
      ++at;
    }
  }
  return out;
}

ColumnStats column_stats(const Eigen::MatrixXd& M) {
  ColumnStats s;
  s.mean = M.colwise().mean();
  s.sd.resize(M.cols());
  const double n = static_cast<double>(M.rows());
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    const double var = (M.col(j).array() - s.mean(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    s.sd(j) = (sd < 1e-12) ? 0.0 : sd;
  }
  return s;
}

Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& M,
                                    const ColumnStats& stats) {
  Eigen::MatrixXd out(M.rows(), M.cols());
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    if (stats.sd(j) == 0.0)
      out.col(j).setZero();
    else
      out.col(j) = (M.col(j).array() - stats.mean(j)) / stats.sd(j);
  }
  return out;
}

Dataset take_rows(const Dataset& ds, const std::vector<int>& rows) {
  Dataset out = ds;
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  out.X.resize(m, ds.X.cols());
  out.A.resize(m, ds.A.cols());
  out.Y.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.X.row(i) = ds.X.row(rows[static_cast<std::size_t>(i)]);
    out.A.row(i) = ds.A.row(rows[static_cast<std::size_t>(i)]);
    out.Y(i) = ds.Y(rows[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_frac,
                                  std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw ConfigError("split: train_frac must lie strictly in (0, 1)");
  const Eigen::Index n = ds.n();
  if (n < 2) throw RuntimeError("split: need at least 2 rows");
  const auto n_train = static_cast<Eigen::Index>(
      std::floor(train_frac * static_cast<double>(n)));
  if (n_train < 1 || n_train >= n)
    throw RuntimeError("split: requested fraction leaves one side empty");

  Rng rng(seed);
  std::vector<int> order = rng.permutation(static_cast<int>(n));
  std::vector<int> train_rows(order.begin(), order.begin() + n_train);
  std::vector<int> test_rows(order.begin() + n_train, order.end());
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return {take_rows(ds, train_rows), take_rows(ds, test_rows)};
}

}  // namespace fairicp
