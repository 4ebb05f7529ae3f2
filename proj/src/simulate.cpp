#include "fairicp/simulate.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "fairicp/errors.hpp"
#include "fairicp/rng.hpp"

namespace fairicp {

namespace {

double draw_mixed_gamma(Rng& rng) {
  // Half-half mixture of Gamma(1, 1) and Gamma(1, 10); shape 1 makes both
  // components exponentials.
  const double scale = (rng.uniform() < 0.5) ? 1.0 : 10.0;
  return rng.exponential(scale);
}

std::vector<AttrColumn> continuous_attr_cols(int p, const std::string& prefix) {
  std::vector<AttrColumn> cols;
  cols.reserve(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j)
    cols.push_back(AttrColumn::continuous(prefix + std::to_string(j + 1)));
  return cols;
}

}  // namespace

void SimSpec::validate() const {
  if (w < 0.0 || w > 1.0) throw ConfigError("sim spec: w must lie in [0, 1]");
  if (!(sigma > 0.0)) throw ConfigError("sim spec: sigma must be positive");
  if (K0 < 0 || K < 0) throw ConfigError("sim spec: negative dimension");
  if (cov_sqrt) {
    if (cov_sqrt->rows() != cov_sqrt->cols())
      throw ConfigError("sim spec: cov_sqrt must be square");
    if (!cov_sqrt->isApprox(cov_sqrt->transpose(), 1e-10))
      throw ConfigError("sim spec: cov_sqrt must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*cov_sqrt);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw ConfigError("sim spec: cov_sqrt must be positive-definite");
  }
}

Eigen::MatrixXd make_cov_sqrt(int p, double lo, double hi, std::uint64_t seed) {
  if (p < 1) throw ConfigError("make_cov_sqrt: p must be >= 1");
  Rng rng(seed);
  Eigen::MatrixXd G(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) G(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  // Fix the sign convention so the basis is a pure function of the seed.
  Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < p; ++j)
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);

  Eigen::VectorXd eig(p);
  for (int j = 0; j < p; ++j)
    eig(j) = (p == 1) ? lo : lo + (hi - lo) * j / static_cast<double>(p - 1);
  return Q * eig.asDiagonal() * Q.transpose();
}

Eigen::MatrixXd gen_mixed_gamma_attrs(
    int n, int K0, int K, const std::optional<Eigen::MatrixXd>& cov_sqrt,
    std::uint64_t seed) {
  if (n < 1) throw ConfigError("gen_mixed_gamma_attrs: n must be >= 1");
  const int p = K0 + K;
  if (p < 1) throw ConfigError("gen_mixed_gamma_attrs: K0 + K must be >= 1");
  if (cov_sqrt && (cov_sqrt->rows() != p || cov_sqrt->cols() != p))
    throw ConfigError("gen_mixed_gamma_attrs: cov_sqrt is " +
                      std::to_string(cov_sqrt->rows()) + "x" +
                      std::to_string(cov_sqrt->cols()) + ", expected " +
                      std::to_string(p) + "x" + std::to_string(p));

  Rng rng(seed);
  Eigen::MatrixXd U(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) U(i, j) = draw_mixed_gamma(rng);
  return cov_sqrt ? Eigen::MatrixXd(U * *cov_sqrt) : U;
}

Eigen::VectorXd gen_quality_response(const Eigen::MatrixXd& A,
                                     const SimSpec& spec) {
  spec.validate();
  if (A.cols() < spec.K0)
    throw ConfigError("gen_quality_response: A has fewer than K0 columns");
  const double sd =
      std::sqrt(spec.sigma * spec.sigma + (1.0 - spec.w) * spec.K0);
  const double root_w = std::sqrt(spec.w);

  Rng rng(mix_seed(spec.seed, 0x59));
  Eigen::VectorXd y(A.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double mean = root_w * A.row(i).head(spec.K0).sum();
    y(i) = rng.normal(mean, sd);
  }
  return y;
}

Dataset gen_quality_dataset(const SimSpec& spec, int n) {
  spec.validate();
  Dataset ds;
  ds.A = gen_mixed_gamma_attrs(n, spec.K0, spec.K, spec.cov_sqrt,
                               mix_seed(spec.seed, 0xA));
  ds.Y = gen_quality_response(ds.A, spec);
  ds.X.resize(n, 0);
  ds.task = TaskKind::regression;
  ds.a_cols = continuous_attr_cols(spec.K0 + spec.K, "a");
  ds.validate();
  return ds;
}

Dataset gen_simulation(const SimSpec& spec, int n) {
  spec.validate();
  if (spec.variant == SimVariant::quality)
    throw ConfigError("gen_simulation: variant must be sim1 or sim2");
  if (n < 1) throw ConfigError("gen_simulation: n must be >= 1");
  const int K = spec.K;
  if (K < 1) throw ConfigError("gen_simulation: K must be >= 1");

  Rng rng(mix_seed(spec.seed, 0x51));
  const double root_w = std::sqrt(spec.w);
  const double x_star_sd = std::sqrt(1.0 - spec.w);

  Dataset ds;
  ds.task = TaskKind::regression;
  const int p = (spec.variant == SimVariant::sim1) ? K : K + 1;
  const int width = (spec.variant == SimVariant::sim1) ? K : 1;
  ds.A.resize(n, p);
  ds.X.resize(n, 2 * width);
  ds.Y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) ds.A(i, j) = draw_mixed_gamma(rng);
    double sum = 0.0;
    for (int k = 0; k < width; ++k) {
      const double x_star = rng.normal(root_w * ds.A(i, k), x_star_sd);
      const double x_prime = rng.normal();
      ds.X(i, k) = x_star;
      ds.X(i, width + k) = x_prime;
      sum += x_star + x_prime;
    }
    ds.Y(i) = rng.normal(sum, spec.sigma);
  }
  ds.a_cols = continuous_attr_cols(p, "a");
  for (int k = 0; k < width; ++k)
    ds.x_names.push_back("x_star" + std::to_string(k + 1));
  for (int k = 0; k < width; ++k)
    ds.x_names.push_back("x_prime" + std::to_string(k + 1));
  ds.validate();
  return ds;
}

}  // namespace fairicp
