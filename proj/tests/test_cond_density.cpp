#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "fairicp/cond_density.hpp"
#include "fairicp/errors.hpp"
#include "fairicp/simulate.hpp"
#include "support/test_utils.hpp"

using namespace fairicp;
namespace tu = fairicp::testutil;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

Dataset quality_data(int n, int k0, int k, double w, std::uint64_t seed,
                     bool mix = false) {
  SimSpec spec;
  spec.variant = SimVariant::quality;
  spec.K0 = k0;
  spec.K = k;
  spec.w = w;
  spec.sigma = 1.0;
  if (mix) spec.cov_sqrt = make_cov_sqrt(k0 + k, 1.0, 5.0, seed + 1);
  spec.seed = seed;
  return gen_quality_dataset(spec, n);
}

}  // namespace

TEST_CASE("OLS recovers the quality-study slope") {
  const Dataset ds = quality_data(10000, 1, 0, 0.6, 101);
  const CondDensity q = fit_y_given_a(ds, Penalty::ridge, 0.0);
  // Closed-form OLS on the generating model: slope -> sqrt(w), with standard
  // error sigma_hat / sqrt(n var(A)).
  const LinearFit fit = ridge_regression(ds.A, ds.Y, 0.0);
  const Eigen::VectorXd resid =
      ds.Y - ((ds.A * fit.beta).array() + fit.intercept).matrix();
  const double s2 = resid.squaredNorm() / static_cast<double>(ds.n());
  const double se =
      std::sqrt(s2 / (static_cast<double>(ds.n()) * tu::sample_var(ds.A.col(0))));
  CHECK(std::abs(fit.beta(0) - std::sqrt(0.6)) < 2.0 * se);

  // The fitted density evaluates as the same Gaussian.
  const double at_mean =
      q.logq_y_given_a(fit.intercept + fit.beta(0) * 2.0,
                       Eigen::RowVectorXd::Constant(1, 2.0));
  CHECK(at_mean == doctest::Approx(-0.5 * std::log(kTwoPi * s2)).epsilon(1e-9));
}

TEST_CASE("constant attribute column is harmless under ridge") {
  Dataset ds = quality_data(500, 1, 0, 0.6, 102);
  Dataset with_const = ds;
  with_const.A.conservativeResize(Eigen::NoChange, 2);
  with_const.A.col(1).setConstant(3.25);
  with_const.a_cols.push_back(AttrColumn::continuous("const"));

  const CondDensity with_q = fit_y_given_a(with_const, Penalty::ridge, 1e-3);
  const CondDensity without_q = fit_y_given_a(ds, Penalty::ridge, 1e-3);
  for (int i = 0; i < 20; ++i) {
    Eigen::RowVectorXd a2(2);
    a2 << ds.A(i, 0), 3.25;
    const double d1 = with_q.logq_y_given_a(ds.Y(i), a2);
    const double d2 = without_q.logq_y_given_a(ds.Y(i), ds.A.row(i));
    CHECK(std::abs(d1 - d2) < 1e-6);
  }
}

TEST_CASE("full lasso shrinkage reduces to the marginal Gaussian") {
  const Dataset ds = quality_data(400, 2, 3, 0.6, 103);
  const CondDensity q = fit_y_given_a(ds, Penalty::lasso, 1e9);
  const double y_mean = ds.Y.mean();
  const double y_var = tu::sample_var(ds.Y);
  // All slopes zero: density is N(mean(y), var(y)) regardless of a.
  const double expect = -0.5 * std::log(kTwoPi * y_var) - 0.0;
  CHECK(q.logq_y_given_a(y_mean, ds.A.row(7)) ==
        doctest::Approx(expect).epsilon(1e-10));
  CHECK(q.logq_y_given_a(y_mean, ds.A.row(13)) ==
        doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("lasso satisfies the subgradient optimality conditions") {
  const Dataset ds = quality_data(300, 3, 7, 0.6, 104, true);
  const double lambda = 0.05;
  const LinearFit fit = lasso_regression(ds.A, ds.Y, lambda);

  // KKT on the standardized problem: |corr_j| <= lambda where beta_j = 0,
  // corr_j = lambda * sign(beta_j) otherwise.
  const ColumnStats stats = column_stats(ds.A);
  const Eigen::MatrixXd Xs = standardize_columns(ds.A, stats);
  const Eigen::VectorXd resid =
      ds.Y - ((ds.A * fit.beta).array() + fit.intercept).matrix();
  bool some_zero = false, some_active = false;
  for (Eigen::Index j = 0; j < ds.A.cols(); ++j) {
    const double corr =
        Xs.col(j).dot(resid) / static_cast<double>(ds.n());
    const double beta_std = fit.beta(j) * stats.sd(j);
    if (beta_std == 0.0) {
      CHECK(std::abs(corr) <= lambda + 1e-6);
      some_zero = true;
    } else {
      CHECK(std::abs(corr - lambda * (beta_std > 0 ? 1.0 : -1.0)) <= 1e-6);
      some_active = true;
    }
  }
  CHECK(some_active);
  CHECK(some_zero);  // noise coordinates get zeroed at this penalty
}

TEST_CASE("ridge path tends to OLS") {
  const Dataset ds = quality_data(500, 2, 2, 0.6, 105, true);
  const LinearFit ols = ridge_regression(ds.A, ds.Y, 0.0);
  const LinearFit almost = ridge_regression(ds.A, ds.Y, 1e-10);
  CHECK((ols.beta - almost.beta).norm() <= 1e-4);

  // Singular designs are rejected without a penalty.
  Dataset small = quality_data(3, 2, 2, 0.6, 106);
  CHECK_THROWS_AS(fit_y_given_a(small, Penalty::ridge, 0.0), RuntimeError);
}

TEST_CASE("gaussian log densities at reference points") {
  // Linear-Gaussian mode: log density at the conditional mean.
  CondDensity::GaussianLinear gl;
  gl.beta = Eigen::VectorXd::Constant(1, 2.0);
  gl.intercept = 1.0;
  gl.s2 = 0.7;
  const CondDensity q =
      CondDensity::gaussian_linear(gl, {AttrColumn::continuous("a")});
  const double mode =
      q.logq_y_given_a(1.0 + 2.0 * 3.0, Eigen::RowVectorXd::Constant(1, 3.0));
  CHECK(mode == doctest::Approx(-0.5 * std::log(kTwoPi * 0.7)).epsilon(1e-12));

  // Multivariate with identity covariance at its mean.
  const int p = 4;
  std::vector<AttrColumn> cols;
  for (int j = 0; j < p; ++j) cols.push_back(AttrColumn::continuous("a"));
  const CondDensity mv = CondDensity::gaussian_multivariate(
      Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(p),
      Eigen::MatrixXd::Identity(p, p), cols);
  CHECK(mv.logq_a_given_y(Eigen::RowVectorXd::Zero(p), 0.3) ==
        doctest::Approx(-0.5 * p * std::log(kTwoPi)).epsilon(1e-12));

  // Oracle quality density equals the hand-computed normal pdf.
  SimSpec spec;
  spec.variant = SimVariant::quality;
  spec.K0 = 5;
  spec.K = 0;
  spec.w = 0.6;
  spec.sigma = 1.0;
  const CondDensity oracle = CondDensity::oracle(spec, Direction::y_given_a);
  Eigen::RowVectorXd a(5);
  a << 1.0, 2.0, 0.5, 3.0, 1.5;
  const double mean = std::sqrt(0.6) * a.sum();
  const double var = 1.0 + 0.4 * 5.0;
  const double y = mean + 1.3;
  const double expect =
      -0.5 * std::log(kTwoPi * var) - 0.5 * 1.3 * 1.3 / var;
  CHECK(oracle.logq_y_given_a(y, a) == doctest::Approx(expect).epsilon(1e-12));

  CHECK_THROWS_AS(
      q.logq_y_given_a(0.0, Eigen::RowVectorXd::Zero(3)), RuntimeError);
}

TEST_CASE("1-d gaussian density integrates to one") {
  const Dataset ds = quality_data(200, 1, 0, 0.6, 107);
  const CondDensity q = fit_y_given_a(ds, Penalty::ridge, 0.0);
  const Eigen::RowVectorXd a = ds.A.row(0);
  // Trapezoid rule over +-10 sd around the mean.
  const double mean_probe = ds.Y.mean();
  const double sd = std::sqrt(tu::sample_var(ds.Y));
  const double lo = mean_probe - 10.0 * sd, hi = mean_probe + 10.0 * sd;
  const int grid = 20001;
  double total = 0.0;
  const double h = (hi - lo) / (grid - 1);
  for (int i = 0; i < grid; ++i) {
    const double y = lo + i * h;
    const double f = std::exp(q.logq_y_given_a(y, a));
    total += (i == 0 || i == grid - 1) ? 0.5 * f : f;
  }
  CHECK(total * h == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("attribute conditional fit: shrinkage behavior") {
  SUBCASE("p=1, no shrinkage: univariate residual variance") {
    const Dataset ds = quality_data(2000, 1, 0, 0.6, 108);
    const CondDensity q = fit_a_given_y(ds, 0.0);
    // Reconstruct the univariate fit directly.
    const LinearFit fit = ridge_regression(
        Eigen::MatrixXd(ds.Y), Eigen::VectorXd(ds.A.col(0)), 0.0);
    const Eigen::VectorXd resid =
        ds.A.col(0) - ((ds.Y * fit.beta(0)).array() + fit.intercept).matrix();
    const double s2 = resid.squaredNorm() / static_cast<double>(ds.n());
    const double at_mean = q.logq_a_given_y(
        Eigen::RowVectorXd::Constant(1, fit.intercept + fit.beta(0) * 2.0),
        2.0);
    CHECK(at_mean == doctest::Approx(-0.5 * std::log(kTwoPi * s2)).epsilon(1e-9));
  }

  SUBCASE("full shrinkage factorizes over coordinates") {
    const Dataset ds = quality_data(300, 2, 3, 0.6, 109, true);
    const CondDensity q = fit_a_given_y(ds, 1.0);
    // Build the per-coordinate univariate models and compare sums.
    for (int probe = 0; probe < 5; ++probe) {
      const double y = ds.Y(probe);
      const Eigen::RowVectorXd a = ds.A.row(probe);
      double sum = 0.0;
      for (Eigen::Index j = 0; j < ds.p(); ++j) {
        Dataset single = ds;
        single.A = ds.A.col(j);
        single.a_cols = {AttrColumn::continuous("a")};
        const CondDensity qj = fit_a_given_y(single, 0.0);
        sum += qj.logq_a_given_y(a.segment(j, 1), y);
      }
      CHECK(std::abs(q.logq_a_given_y(a, y) - sum) < 1e-10);
    }
  }

  SUBCASE("p=25 at n=200 stays positive definite") {
    const Dataset ds = quality_data(200, 5, 20, 0.6, 110, true);
    const CondDensity q = fit_a_given_y(ds, 0.1);
    // Finite log density everywhere percentile-ish points land.
    for (int i = 0; i < 200; i += 17)
      CHECK(std::isfinite(q.logq_a_given_y(ds.A.row(i), ds.Y(i))));
  }

  SUBCASE("categorical attributes are rejected") {
    Dataset ds = quality_data(50, 1, 0, 0.6, 111);
    ds.A.col(0) = (ds.A.col(0).array() > 5.0).cast<double>();
    ds.a_cols = {AttrColumn::with_levels("a1", 2)};
    CHECK_THROWS_AS(fit_a_given_y(ds, 0.0), RuntimeError);
  }
}

TEST_CASE("multinomial classifier fits") {
  SUBCASE("separable binary toy") {
    Dataset ds;
    const int n = 200;
    ds.X.resize(n, 0);
    ds.A.resize(n, 1);
    ds.Y.resize(n);
    for (int i = 0; i < n; ++i) {
      ds.A(i, 0) = i % 2;
      ds.Y(i) = i % 2;
    }
    ds.a_cols = {AttrColumn::with_levels("a1", 2)};
    ds.task = TaskKind::classification;
    ds.n_classes = 2;
    const CondDensity q = fit_y_given_a_classifier(ds, 1e-2);
    const double p0 =
        std::exp(q.logq_y_given_a(0.0, Eigen::RowVectorXd::Constant(1, 0.0)));
    const double p1 =
        std::exp(q.logq_y_given_a(1.0, Eigen::RowVectorXd::Constant(1, 1.0)));
    CHECK(p0 >= 0.9);
    CHECK(p1 >= 0.9);
  }

  SUBCASE("independent attributes land on class frequencies") {
    Rng rng(112);
    Dataset ds;
    const int n = 10000;
    ds.X.resize(n, 0);
    ds.A.resize(n, 1);
    ds.Y.resize(n);
    int ones = 0;
    for (int i = 0; i < n; ++i) {
      ds.A(i, 0) = rng.normal();
      ds.Y(i) = rng.uniform() < 0.3 ? 1.0 : 0.0;
      ones += static_cast<int>(ds.Y(i));
    }
    ds.a_cols = {AttrColumn::continuous("a1")};
    ds.task = TaskKind::classification;
    ds.n_classes = 2;
    const CondDensity q = fit_y_given_a_classifier(ds, 1e-4);
    const double freq1 = static_cast<double>(ones) / n;
    for (double a : {-1.0, 0.0, 2.0}) {
      const double p1 =
          std::exp(q.logq_y_given_a(1.0, Eigen::RowVectorXd::Constant(1, a)));
      CHECK(std::abs(p1 - freq1) < 0.02);
    }
  }

  SUBCASE("three classes: probabilities sum to one") {
    Rng rng(113);
    Dataset ds;
    const int n = 600;
    ds.X.resize(n, 0);
    ds.A.resize(n, 2);
    ds.Y.resize(n);
    for (int i = 0; i < n; ++i) {
      ds.A(i, 0) = rng.normal();
      ds.A(i, 1) = rng.normal();
      ds.Y(i) = static_cast<double>(i % 3);
    }
    ds.a_cols = {AttrColumn::continuous("a1"), AttrColumn::continuous("a2")};
    ds.task = TaskKind::classification;
    ds.n_classes = 3;
    const CondDensity q = fit_y_given_a_classifier(ds, 1e-3);
    for (int t = 0; t < 100; ++t) {
      Eigen::RowVectorXd a(2);
      a << rng.normal(), rng.normal();
      double total = 0.0;
      for (int c = 0; c < 3; ++c)
        total += std::exp(q.logq_y_given_a(c, a));
      CHECK(std::abs(total - 1.0) < 1e-10);
    }
  }

  SUBCASE("single-class response is rejected") {
    Dataset ds;
    ds.X.resize(10, 0);
    ds.A = Eigen::MatrixXd::Random(10, 1);
    ds.Y = Eigen::VectorXd::Zero(10);
    ds.a_cols = {AttrColumn::continuous("a1")};
    ds.task = TaskKind::classification;
    ds.n_classes = 2;
    CHECK_THROWS_AS(fit_y_given_a_classifier(ds, 1e-3), RuntimeError);
  }
}

TEST_CASE("density serialization round-trips") {
  const Dataset ds = quality_data(300, 2, 3, 0.6, 114, true);

  const CondDensity q1 = fit_y_given_a(ds, Penalty::lasso, 0.02);
  const CondDensity q1b = CondDensity::from_json(q1.to_json());
  const CondDensity q2 = fit_a_given_y(ds, 0.2);
  const CondDensity q2b = CondDensity::from_json(q2.to_json());
  SimSpec spec;
  spec.variant = SimVariant::quality;
  spec.K0 = 2;
  spec.K = 3;
  spec.w = 0.6;
  spec.cov_sqrt = make_cov_sqrt(5, 1.0, 5.0, 115);
  const CondDensity q3 = CondDensity::oracle(spec, Direction::a_given_y);
  const CondDensity q3b = CondDensity::from_json(q3.to_json());

  for (int i = 0; i < 10; ++i) {
    CHECK(q1.logq_y_given_a(ds.Y(i), ds.A.row(i)) ==
          doctest::Approx(q1b.logq_y_given_a(ds.Y(i), ds.A.row(i)))
              .epsilon(1e-12));
    CHECK(q2.logq_a_given_y(ds.A.row(i), ds.Y(i)) ==
          doctest::Approx(q2b.logq_a_given_y(ds.A.row(i), ds.Y(i)))
              .epsilon(1e-12));
  }
  SimSpec sample_spec = spec;
  sample_spec.seed = 116;
  const Dataset probe = gen_quality_dataset(sample_spec, 10);
  for (int i = 0; i < 10; ++i)
    CHECK(q3.logq_a_given_y(probe.A.row(i), probe.Y(i)) ==
          doctest::Approx(q3b.logq_a_given_y(probe.A.row(i), probe.Y(i)))
              .epsilon(1e-12));

  nlohmann::json bad = q1.to_json();
  bad["version"] = 99;
  CHECK_THROWS_AS(CondDensity::from_json(bad), ConfigError);
}

TEST_CASE("classification data rejected by the regression fit") {
  Dataset ds;
  ds.X.resize(10, 0);
  ds.A = Eigen::MatrixXd::Random(10, 1);
  ds.Y.resize(10);
  for (int i = 0; i < 10; ++i) ds.Y(i) = i % 2;
  ds.a_cols = {AttrColumn::continuous("a1")};
  ds.task = TaskKind::classification;
  ds.n_classes = 2;
  CHECK_THROWS_AS(fit_y_given_a(ds, Penalty::ridge, 0.1), RuntimeError);
}
