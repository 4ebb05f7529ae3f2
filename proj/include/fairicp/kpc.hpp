#pragma once

#include <Eigen/Dense>
#include <vector>

namespace fairicp {

// Gaussian-kernel nearest-neighbor estimate of the conditional dependence of
// U on V given W. 0 means conditional independence, 1 means U is determined
// by V given W.
struct KpcConfig {
  enum class Bandwidth { median_heuristic, fixed };
  Bandwidth bandwidth = Bandwidth::median_heuristic;
  double fixed_h = 1.0;
  int neighbors = 1;
  bool clamp = true;
};

// Median pairwise Euclidean distance between the rows of U (all pairs up to
// 10^6, sampled beyond that), floored at 1e-8.
double median_bandwidth(const Eigen::MatrixXd& U);

// Exact k-nearest-neighbor table by Euclidean distance, self excluded,
// distance ties broken toward the lowest index. result[i] holds k indices in
// ascending (distance, index) order.
std::vector<std::vector<int>> knn_graph(const Eigen::MatrixXd& Z, int k);

double kpc_estimate(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V,
                    const Eigen::MatrixXd& W, const KpcConfig& cfg = {});

}  // namespace fairicp
