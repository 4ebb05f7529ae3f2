#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fairicp/cond_density.hpp"
#include "fairicp/dataset.hpp"
#include "fairicp/kpc.hpp"

namespace fairicp {

// Test statistic on (predictions, encoded attributes, response encoding).
using Statistic = std::function<double(
    const Eigen::MatrixXd& U, const Eigen::MatrixXd& V,
    const Eigen::MatrixXd& W)>;

struct EoInputs {
  Eigen::MatrixXd y_hat;  // n x 1 (regression) or n x C (probabilities)
  Eigen::MatrixXd A;      // raw attribute rows
  std::vector<AttrColumn> a_cols;
  Eigen::VectorXd y;
  TaskKind task = TaskKind::regression;
  int n_classes = 0;
};

struct EoTestOptions {
  int sweeps = 50;
  KpcConfig kpc;
  std::vector<int> stat_attr_cols;  // restrict the statistic; empty = all
  Statistic statistic;              // empty = kernel partial correlation
};

struct EoTestResult {
  double t_star = 0.0;
  std::vector<double> t_null;
  double p_value = 1.0;
  int copies = 0;
  std::uint64_t seed = 0;
  std::string statistic_tag = "kpc";

  // (1 + #{k : t_null[k] >= t_star}) / (K + 1); the statistic grows with the
  // dependence being tested, so small values reject.
  static double p_from_counts(double t_star, const std::vector<double>& t_null);
};

// Monte Carlo test: draws K inverse-conditional-permutation copies of A with
// independent sub-seeds, recomputes the statistic on each, and compares. q
// must be a Y|A density over the same attribute layout.
EoTestResult eo_test(const EoInputs& in, const CondDensity& q, int copies,
                     std::uint64_t seed, const EoTestOptions& opts = {});

struct EoScenario {
  EoInputs inputs;
  CondDensity q;
  EoTestOptions opts;
};

// Fraction of replicate tests with p-value < alpha; replicates get disjoint
// seeds derived from the root seed.
double power_estimate(const std::function<EoScenario(std::uint64_t)>& make_case,
                      double alpha, int reps, int copies, std::uint64_t seed);

// Encodes attribute rows for the statistic: optional column subset, one-hot
// expansion of categorical columns.
Eigen::MatrixXd statistic_attr_encoding(const Eigen::MatrixXd& A,
                                        const std::vector<AttrColumn>& a_cols,
                                        const std::vector<int>& subset);

// Response encoding for the statistic: raw column for regression, one-hot
// for classification.
Eigen::MatrixXd statistic_response_encoding(const Eigen::VectorXd& y,
                                            TaskKind task, int n_classes);

}  // namespace fairicp
