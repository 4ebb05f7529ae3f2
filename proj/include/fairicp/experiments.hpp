#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairicp/perm_sampler.hpp"
#include "fairicp/simulate.hpp"
#include "fairicp/trainer.hpp"

namespace fairicp {

// Sampler-quality study: for each (trial, K0, K) cell, generate quality data,
// fit both conditional densities, and measure the restricted
// total-variation distance of each method's permutation law against the
// law induced by the true density.
struct TvStudyConfig {
  std::vector<int> k0_list{1, 5, 10};
  std::vector<int> k_list{0, 5, 10, 20, 50, 100};
  double w = 0.6;
  double sigma = 1.0;
  int n = 200;
  int trials = 20;
  bool oracle_estimator = false;  // evaluate the oracle laws instead of fits
  double shrinkage = 0.1;         // CP residual-covariance shrinkage (0 at p=1)
  double lasso_lambda = -1.0;     // < 0: default rule; OLS is used at p=1
  std::uint64_t seed = 0;
  int threads = 1;
};

struct TvStudyRow {
  int trial = 0;
  int K0 = 0;
  int K = 0;
  std::string method;     // "icp" | "cp"
  std::string estimator;  // "fit" | "oracle"
  double tv = 0.0;
};

std::vector<TvStudyRow> run_tv_study(const TvStudyConfig& cfg);

// Accuracy/fairness trade-off study over a mu grid, repeated across
// independently generated train/test pairs.
struct ParetoConfig {
  SimSpec sim;  // sim1 or sim2 (seed field ignored; per-run seeds derive
                // from the study seed)
  int n_train = 500;
  int n_test = 400;
  std::vector<double> mu_grid{0.0, 0.3, 0.5, 0.7, 0.8, 0.9};
  int runs = 20;
  TrainConfig train;
  double lasso_lambda = -1.0;       // fitted training density penalty
  bool oracle_train_density = false;
  bool oracle_test_density = true;  // test with the generating density
  int test_copies = 100;
  double alpha_level = 0.05;
  bool stat_first_attr_only = false;  // restrict the statistic to A1 (sim2)
  std::uint64_t seed = 0;
  int threads = 1;
};

struct ParetoRow {
  int run = 0;
  TradeoffPoint point;
};

std::vector<ParetoRow> run_pareto(const ParetoConfig& cfg);

struct ParetoSummary {
  double mu = 0.0;
  double mean_loss = 0.0;
  double sd_loss = 0.0;
  double mean_kpc = 0.0;
  double sd_kpc = 0.0;
  double mean_p = 0.0;
  double power = 0.0;  // fraction of runs with p < alpha
};

std::vector<ParetoSummary> summarize_pareto(const std::vector<ParetoRow>& rows,
                                            double alpha);

}  // namespace fairicp
