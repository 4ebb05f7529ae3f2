#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <variant>
#include <vector>

#include "fairicp/dataset.hpp"
#include "fairicp/simulate.hpp"

namespace fairicp {

enum class Direction { y_given_a, a_given_y };
enum class Penalty { ridge, lasso };

// Linear-Gaussian regression on an expanded design; also pure coordinate
// descent for the l1 penalty. Exposed on their own so tests can probe the
// optimality conditions directly.
struct LinearFit {
  Eigen::VectorXd beta;  // original-scale coefficients on the design columns
  double intercept = 0.0;
  int sweeps = 0;  // coordinate-descent sweeps used (lasso only)
};
LinearFit ridge_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           double lambda);
LinearFit lasso_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           double lambda);

// Conditional density of Y given A (drives inverse conditional permutation)
// or of A given Y (drives plain conditional permutation). Immutable after
// construction; evaluation is reentrant.
class CondDensity {
 public:
  struct GaussianLinear {  // y | a ~ N(intercept + beta . phi(a), s2)
    Eigen::VectorXd beta;
    double intercept = 0.0;
    double s2 = 1.0;
  };
  struct GaussianMultivariate {  // a | y ~ N(c + g y, Sigma)
    Eigen::VectorXd c;
    Eigen::VectorXd g;
    Eigen::MatrixXd sigma;
    Eigen::MatrixXd sigma_inv;  // cached
    double log_det = 0.0;       // cached
  };
  struct MultinomialLogistic {  // y in {0..C-1} | a: softmax(W phi(a) + b)
    Eigen::MatrixXd W;          // C x m
    Eigen::VectorXd b;          // C
  };
  struct Oracle {  // exact generating conditional of a SimSpec
    SimSpec spec;
    Eigen::MatrixXd cov_sqrt_inv;  // empty when the spec has no mixing matrix
  };

  Direction direction() const { return direction_; }
  const std::vector<AttrColumn>& attr_columns() const { return a_cols_; }
  bool is_oracle() const { return std::holds_alternative<Oracle>(form_); }

  // Single-factor log density. Dimensions follow the direction:
  // y_given_a wants (left, right) = (y as a 1-vector, attribute row);
  // a_given_y wants (attribute row, y as a 1-vector). For the a_given_y
  // oracle the value is normalized only up to an additive function of y,
  // which cancels in every permutation-law ratio.
  double log_density(const Eigen::VectorXd& left,
                     const Eigen::VectorXd& right) const;

  double logq_y_given_a(double y, const Eigen::RowVectorXd& a_row) const;
  double logq_a_given_y(const Eigen::RowVectorXd& a_row, double y) const;

  // M(i, j) = log q(Y_j | A_i)  for direction y_given_a,
  //           log q(A_j | Y_i)  for direction a_given_y.
  // This is the table both permutation samplers run on.
  Eigen::MatrixXd log_density_matrix(const Eigen::MatrixXd& A,
                                     const Eigen::VectorXd& Y) const;

  nlohmann::json to_json() const;
  static CondDensity from_json(const nlohmann::json& j);

  static CondDensity gaussian_linear(GaussianLinear params,
                                     std::vector<AttrColumn> a_cols);
  static CondDensity gaussian_multivariate(Eigen::VectorXd c, Eigen::VectorXd g,
                                           const Eigen::MatrixXd& sigma,
                                           std::vector<AttrColumn> a_cols);
  static CondDensity multinomial(MultinomialLogistic params,
                                 std::vector<AttrColumn> a_cols);
  static CondDensity oracle(const SimSpec& spec, Direction direction);

 private:
  CondDensity() = default;
  Eigen::VectorXd expand_row(const Eigen::RowVectorXd& a_row) const;

  Direction direction_ = Direction::y_given_a;
  std::variant<GaussianLinear, GaussianMultivariate, MultinomialLogistic,
               Oracle>
      form_;
  std::vector<AttrColumn> a_cols_;
};

// Gaussian fit of Y on the (drop-first expanded) attributes with the chosen
// penalty; residual variance floored at 1e-8.
CondDensity fit_y_given_a(const Dataset& train, Penalty penalty,
                          double lambda);

// Per-coordinate linear means of A on Y with residual covariance shrunk
// toward its diagonal and eigenvalues floored at 1e-8. Continuous attributes
// only.
CondDensity fit_a_given_y(const Dataset& train, double shrinkage);

// Multinomial logistic fit of a categorical response on the expanded
// attributes, full-batch gradient descent with an l2 penalty.
CondDensity fit_y_given_a_classifier(const Dataset& train,
                                     double ridge_lambda);

// Default l1 penalty weight: 0.01 * max_j |<phi_j, y - mean(y)>| / n on the
// standardized design (1% of the smallest weight that zeroes every slope).
double default_lasso_lambda(const Dataset& train);

// Stable log density of the half-half Gamma(1,1)/Gamma(1,10) mixture.
double mixed_gamma_log_density(double x);

}  // namespace fairicp
