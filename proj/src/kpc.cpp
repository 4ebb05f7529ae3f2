#include "fairicp/kpc.hpp"

#include <algorithm>
#include <cmath>

#include "fairicp/dataset.hpp"
#include "fairicp/errors.hpp"
#include "fairicp/rng.hpp"

namespace fairicp {

namespace {

constexpr double kBandwidthFloor = 1e-8;
constexpr double kDenominatorFloor = 1e-12;

double mean_neighbor_kernel(const Eigen::MatrixXd& U,
                            const std::vector<std::vector<int>>& graph,
                            double h) {
  const double inv = 1.0 / (2.0 * h * h);
  double total = 0.0;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    double s = 0.0;
    for (int j : graph[i])
      s += std::exp(-(U.row(static_cast<Eigen::Index>(i)) - U.row(j))
                         .squaredNorm() *
                    inv);
    total += s / static_cast<double>(graph[i].size());
  }
  return total / static_cast<double>(graph.size());
}

}  // namespace

double median_bandwidth(const Eigen::MatrixXd& U) {
  const Eigen::Index n = U.rows();
  if (n < 2) throw RuntimeError("median_bandwidth: need at least 2 points");
  std::vector<double> dists;
  const std::uint64_t all_pairs =
      static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1) / 2;
  constexpr std::uint64_t kPairBudget = 1000000;
  if (all_pairs <= kPairBudget) {
    dists.reserve(all_pairs);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        dists.push_back((U.row(i) - U.row(j)).norm());
  } else {
    Rng rng(0xBADu);  // fixed stream keeps the heuristic deterministic
    dists.reserve(kPairBudget);
    for (std::uint64_t t = 0; t < kPairBudget; ++t) {
      const auto i = static_cast<Eigen::Index>(rng.uniform_int(n));
      auto j = static_cast<Eigen::Index>(rng.uniform_int(n - 1));
      if (j >= i) ++j;
      dists.push_back((U.row(i) - U.row(j)).norm());
    }
  }
  const std::size_t mid = (dists.size() - 1) / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  return std::max(dists[mid], kBandwidthFloor);
}

std::vector<std::vector<int>> knn_graph(const Eigen::MatrixXd& Z, int k) {
  const int n = static_cast<int>(Z.rows());
  if (n < 2) throw RuntimeError("knn_graph: need at least 2 points");
  if (k < 1 || k >= n)
    throw RuntimeError("knn_graph: k must lie in [1, n-1]");

  std::vector<std::vector<int>> graph(static_cast<std::size_t>(n));
  std::vector<std::pair<double, int>> cand(static_cast<std::size_t>(n - 1));
  for (int i = 0; i < n; ++i) {
    std::size_t at = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      cand[at++] = {(Z.row(i) - Z.row(j)).squaredNorm(), j};
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    auto& out = graph[static_cast<std::size_t>(i)];
    out.resize(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) out[static_cast<std::size_t>(t)] = cand[t].second;
  }
  return graph;
}

double kpc_estimate(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V,
                    const Eigen::MatrixXd& W, const KpcConfig& cfg) {
  const Eigen::Index n = U.rows();
  if (V.rows() != n || W.rows() != n)
    throw RuntimeError("kpc_estimate: row counts differ");
  if (n < 3) throw RuntimeError("kpc_estimate: need at least 3 rows");
  if (cfg.neighbors < 1) throw ConfigError("kpc_estimate: neighbors must be >= 1");
  if (cfg.bandwidth == KpcConfig::Bandwidth::fixed && !(cfg.fixed_h > 0.0))
    throw ConfigError("kpc_estimate: fixed bandwidth must be positive");

  // Neighbor geometry is scale-sensitive; both conditioning blocks enter
  // standardized per coordinate.
  const Eigen::MatrixXd Ws = standardize_columns(W, column_stats(W));
  const Eigen::MatrixXd Vs = standardize_columns(V, column_stats(V));
  Eigen::MatrixXd WV(n, Ws.cols() + Vs.cols());
  WV << Ws, Vs;

  const auto graph_w = knn_graph(Ws, cfg.neighbors);
  const auto graph_wv = knn_graph(WV, cfg.neighbors);

  const double h = cfg.bandwidth == KpcConfig::Bandwidth::fixed
                       ? cfg.fixed_h
                       : median_bandwidth(U);

  // k(u, u) == 1, so the numerator/denominator pair reduces to two mean
  // neighbor-kernel sums.
  const double k_wv = mean_neighbor_kernel(U, graph_wv, h);
  const double k_w = mean_neighbor_kernel(U, graph_w, h);
  const double denom = 1.0 - k_w;
  if (denom < kDenominatorFloor) return 0.0;  // all U effectively identical
  double rho2 = (k_wv - k_w) / denom;
  if (cfg.clamp) rho2 = std::clamp(rho2, 0.0, 1.0);
  return rho2;
}

}  // namespace fairicp
