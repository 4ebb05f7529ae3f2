#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "fairicp/dataset.hpp"

namespace fairicp {

enum class SimVariant { quality, sim1, sim2 };

// Parameters of the synthetic generators. `quality` draws correlated
// mixed-Gamma attributes and a response driven by the first K0 of them;
// `sim1`/`sim2` route the attribute signal through features instead.
struct SimSpec {
  SimVariant variant = SimVariant::quality;
  int K0 = 1;          // response-relevant attribute coordinates
  int K = 0;           // noise coordinates (quality/sim2) or width (sim1)
  double w = 0.6;      // dependence weight in [0, 1]
  double sigma = 1.0;  // response noise s.d.
  std::optional<Eigen::MatrixXd> cov_sqrt;  // optional mixing matrix
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

// Square root of a random covariance matrix: a seeded random orthogonal basis
// times diag of eigenvalues equally spaced in [lo, hi].
Eigen::MatrixXd make_cov_sqrt(int p, double lo, double hi, std::uint64_t seed);

// n rows of (K0 + K) i.i.d. draws from the half-half mixture of Gamma(1,1)
// and Gamma(1,10), optionally right-multiplied by cov_sqrt.
Eigen::MatrixXd gen_mixed_gamma_attrs(
    int n, int K0, int K, const std::optional<Eigen::MatrixXd>& cov_sqrt,
    std::uint64_t seed);

// Y_i ~ Normal(sqrt(w) * sum of the first K0 attribute columns,
//              sigma^2 + (1 - w) * K0).
Eigen::VectorXd gen_quality_response(const Eigen::MatrixXd& A,
                                     const SimSpec& spec);

// Full dataset for the quality variant (X is an empty n x 0 block: the
// quality study concerns only the (A, Y) pair).
Dataset gen_quality_dataset(const SimSpec& spec, int n);

// Regression datasets for sim1/sim2. sim1: X = [X*, X'] with K columns each,
// X* ~ N(sqrt(w) A, (1-w)I), X' ~ N(0, I), Y ~ N(sum X* + sum X', sigma^2),
// A has K mixed-Gamma columns. sim2: scalar X*, X'; A has K+1 columns of
// which only the first drives X*.
Dataset gen_simulation(const SimSpec& spec, int n);

}  // namespace fairicp
