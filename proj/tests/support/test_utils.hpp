#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "fairicp/cond_density.hpp"
#include "fairicp/dataset.hpp"
#include "fairicp/rng.hpp"

namespace fairicp::testutil {

// Jointly Gaussian (A, Y) with every conditional available in closed form:
// A ~ N(0, L L^T), Y = coef . A + noise,  noise ~ N(0, noise_var).
// The exact conditionals feed the sampler-exactness and duality checks.
struct GaussianJoint {
  Eigen::MatrixXd L;       // p x p, A = Z L^T with Z standard normal
  Eigen::VectorXd coef;    // p
  double noise_var = 1.0;

  Eigen::Index p() const { return coef.size(); }

  static GaussianJoint example(int p, std::uint64_t seed) {
    Rng rng(seed);
    GaussianJoint joint;
    joint.L = Eigen::MatrixXd::Identity(p, p);
    for (int i = 0; i < p; ++i) {
      joint.L(i, i) = 0.8 + 0.4 * rng.uniform();
      for (int j = 0; j < i; ++j) joint.L(i, j) = 0.3 * (rng.uniform() - 0.5);
    }
    joint.coef.resize(p);
    for (int i = 0; i < p; ++i) joint.coef(i) = 0.5 + rng.uniform();
    joint.noise_var = 0.5;
    return joint;
  }

  Dataset sample(int n, std::uint64_t seed) const {
    Rng rng(seed);
    Dataset ds;
    ds.A.resize(n, p());
    ds.Y.resize(n);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd z(p());
      for (Eigen::Index j = 0; j < p(); ++j) z(j) = rng.normal();
      ds.A.row(i) = (L * z).transpose();
      ds.Y(i) = coef.dot(ds.A.row(i)) + std::sqrt(noise_var) * rng.normal();
    }
    ds.X.resize(n, 0);
    for (Eigen::Index j = 0; j < p(); ++j)
      ds.a_cols.push_back(AttrColumn::continuous("a" + std::to_string(j + 1)));
    return ds;
  }

  // Exact Y | A: N(coef . a, noise_var).
  CondDensity q_y_given_a() const {
    CondDensity::GaussianLinear gl;
    gl.beta = coef;
    gl.intercept = 0.0;
    gl.s2 = noise_var;
    std::vector<AttrColumn> cols;
    for (Eigen::Index j = 0; j < p(); ++j)
      cols.push_back(AttrColumn::continuous("a" + std::to_string(j + 1)));
    return CondDensity::gaussian_linear(std::move(gl), std::move(cols));
  }

  // Exact A | Y: N((c / v) y, Sigma_a - c c^T / v) with c = Sigma_a coef and
  // v = coef^T Sigma_a coef + noise_var.
  CondDensity q_a_given_y() const {
    const Eigen::MatrixXd sigma_a = L * L.transpose();
    const Eigen::VectorXd c = sigma_a * coef;
    const double v = coef.dot(c) + noise_var;
    const Eigen::MatrixXd sigma_cond = sigma_a - (c * c.transpose()) / v;
    std::vector<AttrColumn> cols;
    for (Eigen::Index j = 0; j < p(); ++j)
      cols.push_back(AttrColumn::continuous("a" + std::to_string(j + 1)));
    return CondDensity::gaussian_multivariate(
        Eigen::VectorXd::Zero(p()), c / v, sigma_cond, std::move(cols));
  }
};

// Central-difference gradient check; returns the relative error
// ||g_fd - g_an|| / max(||g_fd||, ||g_an||, 1e-12).
inline double gradient_rel_error(
    const std::function<double(const Eigen::VectorXd&)>& loss,
    const Eigen::VectorXd& theta, const Eigen::VectorXd& analytic,
    double eps = 1e-5) {
  Eigen::VectorXd fd(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd hi = theta, lo = theta;
    hi(i) += eps;
    lo(i) -= eps;
    fd(i) = (loss(hi) - loss(lo)) / (2.0 * eps);
  }
  const double scale = std::max({fd.norm(), analytic.norm(), 1e-12});
  return (fd - analytic).norm() / scale;
}

inline double sample_mean(const Eigen::VectorXd& v) { return v.mean(); }

inline double sample_var(const Eigen::VectorXd& v) {
  const double m = v.mean();
  return (v.array() - m).square().sum() / static_cast<double>(v.size());
}

inline double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double ma = a.mean(), mb = b.mean();
  const Eigen::ArrayXd da = a.array() - ma, db = b.array() - mb;
  return (da * db).sum() / std::sqrt(da.square().sum() * db.square().sum());
}

// Chi-square critical values used by the goodness-of-fit checks.
inline constexpr double kChi2_99_df9 = 21.665994333461924;
inline constexpr double kChi2_999_df23 = 49.728245283872696;

}  // namespace fairicp::testutil
