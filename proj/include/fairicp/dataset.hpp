#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace fairicp {

enum class TaskKind { regression, classification };

// One sensitive-attribute column. Categorical columns hold integer codes in
// [0, levels); continuous columns have levels == 0.
struct AttrColumn {
  std::string name;
  bool categorical = false;
  int levels = 0;

  static AttrColumn continuous(std::string name) {
    return AttrColumn{std::move(name), false, 0};
  }
  static AttrColumn with_levels(std::string name, int levels) {
    return AttrColumn{std::move(name), true, levels};
  }
};

// Row-aligned triple (X, A, Y). A categorical response is stored as class
// codes 0..n_classes-1 in Y.
struct Dataset {
  Eigen::MatrixXd X;  // n x d_x features
  Eigen::MatrixXd A;  // n x p sensitive attributes
  Eigen::VectorXd Y;  // n responses
  TaskKind task = TaskKind::regression;
  int n_classes = 0;  // classification only
  std::vector<std::string> x_names;
  std::vector<AttrColumn> a_cols;
  std::string y_name = "y";

  Eigen::Index n() const { return Y.size(); }
  Eigen::Index p() const { return A.cols(); }
  Eigen::Index d_x() const { return X.cols(); }
  bool any_categorical_attr() const;

  // Throws RuntimeError when a structural invariant is broken: mismatched row
  // counts, non-finite values, out-of-range category codes, or n == 0.
  void validate() const;
};

enum class OneHot {
  full,       // L indicator columns per categorical attribute
  drop_first  // L-1 indicator columns; keeps OLS designs full-rank
};

// Expands categorical columns of an attribute matrix to indicators;
// continuous columns pass through. This is the single expansion rule used by
// density fits (drop_first) and by discriminator/KPC encodings (full).
Eigen::MatrixXd expand_attributes(const Eigen::MatrixXd& A,
                                  const std::vector<AttrColumn>& cols,
                                  OneHot mode);

// Column means and standard deviations (1/n convention). Standard deviations
// below 1e-12 are reported as exactly 0 so callers can special-case constant
// columns.
struct ColumnStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
};
ColumnStats column_stats(const Eigen::MatrixXd& M);

// (M - mean) / sd with constant columns mapped to all-zero columns.
Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& M,
                                    const ColumnStats& stats);

// Deterministic row split: train gets floor(train_frac * n) rows, chosen by a
// seeded permutation; the two parts are disjoint and cover every row.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_frac,
                                  std::uint64_t seed);

Dataset take_rows(const Dataset& ds, const std::vector<int>& rows);

}  // namespace fairicp
