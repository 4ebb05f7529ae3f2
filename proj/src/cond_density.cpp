#include "fairicp/cond_density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <string>

#include "fairicp/errors.hpp"
#include "fairicp/json_eigen.hpp"

namespace fairicp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kVarianceFloor = 1e-8;
constexpr double kEigenFloor = 1e-8;

double gaussian_log_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(kTwoPi * var) - 0.5 * d * d / var;
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

LinearFit unstandardize(const Eigen::VectorXd& beta_std,
                        const ColumnStats& stats, double y_mean) {
  LinearFit fit;
  fit.beta.resize(beta_std.size());
  double offset = 0.0;
  for (Eigen::Index j = 0; j < beta_std.size(); ++j) {
    fit.beta(j) = (stats.sd(j) > 0.0) ? beta_std(j) / stats.sd(j) : 0.0;
    offset += fit.beta(j) * stats.mean(j);
  }
  fit.intercept = y_mean - offset;
  return fit;
}

// Mean and variance of the oracle response law given one attribute row.
std::pair<double, double> oracle_y_moments(const SimSpec& spec,
                                           const Eigen::RowVectorXd& a_row) {
  const double root_w = std::sqrt(spec.w);
  switch (spec.variant) {
    case SimVariant::quality:
      return {root_w * a_row.head(spec.K0).sum(),
              spec.sigma * spec.sigma + (1.0 - spec.w) * spec.K0};
    case SimVariant::sim1:
      return {root_w * a_row.head(spec.K).sum(),
              spec.K * (1.0 - spec.w) + spec.K + spec.sigma * spec.sigma};
    case SimVariant::sim2:
      return {root_w * a_row(0), (1.0 - spec.w) + 1.0 + spec.sigma * spec.sigma};
  }
  throw RuntimeError("oracle: unknown variant");
}

int oracle_attr_dim(const SimSpec& spec) {
  switch (spec.variant) {
    case SimVariant::quality:
      return spec.K0 + spec.K;
    case SimVariant::sim1:
      return spec.K;
    case SimVariant::sim2:
      return spec.K + 1;
  }
  throw RuntimeError("oracle: unknown variant");
}

std::string direction_tag(Direction d) {
  return d == Direction::y_given_a ? "y_given_a" : "a_given_y";
}

std::string variant_tag(SimVariant v) {
  switch (v) {
    case SimVariant::quality: return "quality";
    case SimVariant::sim1: return "sim1";
    case SimVariant::sim2: return "sim2";
  }
  throw RuntimeError("unknown sim variant");
}

SimVariant variant_from_tag(const std::string& s) {
  if (s == "quality") return SimVariant::quality;
  if (s == "sim1") return SimVariant::sim1;
  if (s == "sim2") return SimVariant::sim2;
  throw ConfigError("unknown sim variant '" + s + "'");
}

}  // namespace

double mixed_gamma_log_density(double x) {
  if (x < 0.0) return -std::numeric_limits<double>::infinity();
  // log(0.5 exp(-x) + 0.05 exp(-x/10)), evaluated as a stable log-sum-exp.
  const double t1 = -x + std::log(0.5);
  const double t2 = -0.1 * x + std::log(0.05);
  const double hi = std::max(t1, t2);
  const double lo = std::min(t1, t2);
  return hi + std::log1p(std::exp(lo - hi));
}

LinearFit ridge_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           double lambda) {
  if (lambda < 0.0) throw ConfigError("ridge: negative penalty");
  const Eigen::Index n = X.rows();
  const Eigen::Index m = X.cols();
  if (n < 2 || y.size() != n) throw RuntimeError("ridge: bad problem shape");
  const double y_mean = y.mean();
  if (m == 0) return LinearFit{Eigen::VectorXd(0), y_mean, 0};
  if (lambda == 0.0 && n <= m)
    throw RuntimeError("ridge: normal equations singular (n <= p, no penalty)");

  const ColumnStats stats = column_stats(X);
  const Eigen::MatrixXd Xs = standardize_columns(X, stats);
  const Eigen::VectorXd yc = y.array() - y_mean;

  Eigen::MatrixXd gram = (Xs.transpose() * Xs) / static_cast<double>(n);
  gram.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw RuntimeError("ridge: normal equations singular");
  const Eigen::VectorXd beta_std =
      llt.solve(Xs.transpose() * yc / static_cast<double>(n));
  return unstandardize(beta_std, stats, y_mean);
}

LinearFit lasso_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           double lambda) {
  if (lambda < 0.0) throw ConfigError("lasso: negative penalty");
  const Eigen::Index n = X.rows();
  const Eigen::Index m = X.cols();
  if (n < 2 || y.size() != n) throw RuntimeError("lasso: bad problem shape");
  const double y_mean = y.mean();
  if (m == 0) return LinearFit{Eigen::VectorXd(0), y_mean, 0};

  const ColumnStats stats = column_stats(X);
  const Eigen::MatrixXd Xs = standardize_columns(X, stats);
  const Eigen::VectorXd yc = y.array() - y_mean;

  // Cyclic coordinate descent on (1/2n)||yc - Xs b||^2 + lambda ||b||_1.
  // Standardized columns have ||x_j||^2/n == 1, so each coordinate update is
  // a single soft-threshold.
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd resid = yc;
  constexpr int kMaxSweeps = 10000;
  constexpr double kTol = 1e-8;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (stats.sd(j) == 0.0) continue;
      const double z =
          Xs.col(j).dot(resid) / static_cast<double>(n) + beta(j);
      const double nb = soft_threshold(z, lambda);
      const double delta = nb - beta(j);
      if (delta != 0.0) {
        resid -= Xs.col(j) * delta;
        beta(j) = nb;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    if (max_delta < kTol) {
      ++sweep;
      break;
    }
  }
  LinearFit fit = unstandardize(beta, stats, y_mean);
  fit.sweeps = sweep;
  return fit;
}

CondDensity fit_y_given_a(const Dataset& train, Penalty penalty,
                          double lambda) {
  train.validate();
  if (train.task != TaskKind::regression)
    throw RuntimeError(
        "fit_y_given_a: classification task; use fit_y_given_a_classifier");
  if (train.n() < 2) throw RuntimeError("fit_y_given_a: need n > 1");

  const Eigen::MatrixXd phi =
      expand_attributes(train.A, train.a_cols, OneHot::drop_first);
  const LinearFit fit = (penalty == Penalty::ridge)
                            ? ridge_regression(phi, train.Y, lambda)
                            : lasso_regression(phi, train.Y, lambda);
  const Eigen::VectorXd resid =
      train.Y - (phi * fit.beta).array().matrix() -
      Eigen::VectorXd::Constant(train.n(), fit.intercept);
  const double s2 =
      std::max(resid.squaredNorm() / static_cast<double>(train.n()),
               kVarianceFloor);
  return CondDensity::gaussian_linear({fit.beta, fit.intercept, s2},
                                      train.a_cols);
}

CondDensity fit_a_given_y(const Dataset& train, double shrinkage) {
  train.validate();
  if (shrinkage < 0.0 || shrinkage > 1.0)
    throw ConfigError("fit_a_given_y: shrinkage must lie in [0, 1]");
  if (train.any_categorical_attr())
    throw RuntimeError(
        "fit_a_given_y: categorical attribute present; the conditional "
        "permutation path supports continuous attributes only");
  const Eigen::Index n = train.n();
  if (n < 2) throw RuntimeError("fit_a_given_y: need n > 1");
  const Eigen::Index p = train.p();

  const double y_mean = train.Y.mean();
  const Eigen::VectorXd yc = train.Y.array() - y_mean;
  const double y_var = yc.squaredNorm() / static_cast<double>(n);

  Eigen::VectorXd g(p), c(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double a_mean = train.A.col(j).mean();
    const double cov =
        (train.A.col(j).array() - a_mean).matrix().dot(yc) /
        static_cast<double>(n);
    g(j) = (y_var > kVarianceFloor) ? cov / y_var : 0.0;
    c(j) = a_mean - g(j) * y_mean;
  }
  Eigen::MatrixXd resid = train.A;
  for (Eigen::Index j = 0; j < p; ++j)
    resid.col(j) -= (c(j) + (g(j) * train.Y.array())).matrix();
  Eigen::MatrixXd S = resid.transpose() * resid / static_cast<double>(n);
  Eigen::MatrixXd sigma =
      (1.0 - shrinkage) * S +
      shrinkage * Eigen::MatrixXd(S.diagonal().asDiagonal());
  return CondDensity::gaussian_multivariate(std::move(c), std::move(g), sigma,
                                            train.a_cols);
}

CondDensity fit_y_given_a_classifier(const Dataset& train,
                                     double ridge_lambda) {
  train.validate();
  if (train.task != TaskKind::classification)
    throw RuntimeError("fit_y_given_a_classifier: regression task");
  if (ridge_lambda < 0.0) throw ConfigError("classifier: negative penalty");
  const Eigen::Index n = train.n();
  const int C = train.n_classes;
  {
    const double first = train.Y(0);
    bool single = true;
    for (Eigen::Index i = 1; i < n && single; ++i) single = (train.Y(i) == first);
    if (single)
      throw RuntimeError("fit_y_given_a_classifier: single-class response");
  }

  const Eigen::MatrixXd phi_raw =
      expand_attributes(train.A, train.a_cols, OneHot::drop_first);
  const ColumnStats stats = column_stats(phi_raw);
  const Eigen::MatrixXd phi = standardize_columns(phi_raw, stats);
  const Eigen::Index m = phi.cols();

  Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(n, C);
  for (Eigen::Index i = 0; i < n; ++i) onehot(i, static_cast<int>(train.Y(i))) = 1.0;

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(C, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(C);

  auto objective = [&](const Eigen::MatrixXd& Wc, const Eigen::VectorXd& bc,
                       Eigen::MatrixXd* probs) -> double {
    Eigen::MatrixXd Z = phi * Wc.transpose();
    Z.rowwise() += bc.transpose();
    double nll = 0.0;
    Eigen::MatrixXd P(n, C);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double zmax = Z.row(i).maxCoeff();
      const double lse =
          zmax + std::log((Z.row(i).array() - zmax).exp().sum());
      P.row(i) = (Z.row(i).array() - lse).exp();
      nll -= Z(i, static_cast<int>(train.Y(i))) - lse;
    }
    if (probs) *probs = std::move(P);
    return nll / static_cast<double>(n) + ridge_lambda * Wc.squaredNorm();
  };

  // Plain full-batch descent; backtracking keeps the fixed-step rule safe on
  // badly scaled designs.
  double step = 1.0;
  constexpr int kMaxIters = 10000;
  constexpr double kGradTol = 1e-6;
  Eigen::MatrixXd P;
  double fval = objective(W, b, &P);
  for (int it = 0; it < kMaxIters; ++it) {
    const Eigen::MatrixXd G = (P - onehot) / static_cast<double>(n);
    const Eigen::MatrixXd gW =
        G.transpose() * phi + 2.0 * ridge_lambda * W;
    const Eigen::VectorXd gb = G.colwise().sum();
    const double grad_norm =
        std::sqrt(gW.squaredNorm() + gb.squaredNorm());
    if (grad_norm < kGradTol) break;

    double trial = step * 2.0;
    while (trial > 1e-12) {
      const Eigen::MatrixXd Wt = W - trial * gW;
      const Eigen::VectorXd bt = b - trial * gb;
      Eigen::MatrixXd Pt;
      const double ft = objective(Wt, bt, &Pt);
      if (ft <= fval - 0.5 * trial * grad_norm * grad_norm) {
        W = Wt;
        b = bt;
        P = std::move(Pt);
        fval = ft;
        step = trial;
        break;
      }
      trial *= 0.5;
    }
    if (trial <= 1e-12) break;  // no descent step left at double precision
  }

  // Fold the standardization back into the weights so evaluation sees raw
  // expanded attributes.
  CondDensity::MultinomialLogistic params;
  params.W = Eigen::MatrixXd::Zero(C, m);
  params.b = b;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (stats.sd(j) == 0.0) continue;
    params.W.col(j) = W.col(j) / stats.sd(j);
    params.b -= W.col(j) * (stats.mean(j) / stats.sd(j));
  }
  return CondDensity::multinomial(std::move(params), train.a_cols);
}

double default_lasso_lambda(const Dataset& train) {
  const Eigen::MatrixXd phi =
      expand_attributes(train.A, train.a_cols, OneHot::drop_first);
  if (phi.cols() == 0) return 0.0;
  const ColumnStats stats = column_stats(phi);
  const Eigen::MatrixXd phis = standardize_columns(phi, stats);
  const Eigen::VectorXd yc = train.Y.array() - train.Y.mean();
  const double lambda_max =
      (phis.transpose() * yc).cwiseAbs().maxCoeff() /
      static_cast<double>(train.n());
  return 0.01 * lambda_max;
}

CondDensity CondDensity::gaussian_linear(GaussianLinear params,
                                         std::vector<AttrColumn> a_cols) {
  if (!(params.s2 > 0.0))
    throw RuntimeError("gaussian_linear: non-positive variance");
  CondDensity d;
  d.direction_ = Direction::y_given_a;
  d.form_ = std::move(params);
  d.a_cols_ = std::move(a_cols);
  return d;
}

CondDensity CondDensity::gaussian_multivariate(
    Eigen::VectorXd c, Eigen::VectorXd g, const Eigen::MatrixXd& sigma,
    std::vector<AttrColumn> a_cols) {
  const Eigen::Index p = c.size();
  if (g.size() != p || sigma.rows() != p || sigma.cols() != p)
    throw RuntimeError("gaussian_multivariate: inconsistent dimensions");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  if (es.info() != Eigen::Success)
    throw RuntimeError("gaussian_multivariate: eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(kEigenFloor);

  GaussianMultivariate params;
  params.c = std::move(c);
  params.g = std::move(g);
  params.sigma = es.eigenvectors() * ev.asDiagonal() *
                 es.eigenvectors().transpose();
  params.sigma = 0.5 * (params.sigma + params.sigma.transpose()).eval();
  params.sigma_inv = es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                     es.eigenvectors().transpose();
  params.log_det = ev.array().log().sum();

  CondDensity d;
  d.direction_ = Direction::a_given_y;
  d.form_ = std::move(params);
  d.a_cols_ = std::move(a_cols);
  return d;
}

CondDensity CondDensity::multinomial(MultinomialLogistic params,
                                     std::vector<AttrColumn> a_cols) {
  CondDensity d;
  d.direction_ = Direction::y_given_a;
  d.form_ = std::move(params);
  d.a_cols_ = std::move(a_cols);
  return d;
}

CondDensity CondDensity::oracle(const SimSpec& spec, Direction direction) {
  spec.validate();
  if (direction == Direction::a_given_y &&
      spec.variant != SimVariant::quality)
    throw ConfigError(
        "oracle: the attribute conditional is only available for the quality "
        "generator");
  Oracle o;
  o.spec = spec;
  if (spec.cov_sqrt) o.cov_sqrt_inv = spec.cov_sqrt->inverse();

  CondDensity d;
  d.direction_ = direction;
  d.form_ = std::move(o);
  const int p = oracle_attr_dim(spec);
  for (int j = 0; j < p; ++j)
    d.a_cols_.push_back(AttrColumn::continuous("a" + std::to_string(j + 1)));
  return d;
}

Eigen::VectorXd CondDensity::expand_row(const Eigen::RowVectorXd& a_row) const {
  if (a_row.size() != static_cast<Eigen::Index>(a_cols_.size()))
    throw RuntimeError("cond_density: attribute row has wrong width");
  return expand_attributes(a_row, a_cols_, OneHot::drop_first).row(0);
}

double CondDensity::logq_y_given_a(double y,
                                   const Eigen::RowVectorXd& a_row) const {
  if (direction_ != Direction::y_given_a)
    throw RuntimeError("cond_density: model is for A given Y");
  if (const auto* gl = std::get_if<GaussianLinear>(&form_)) {
    const Eigen::VectorXd phi = expand_row(a_row);
    return gaussian_log_pdf(y, gl->intercept + gl->beta.dot(phi), gl->s2);
  }
  if (const auto* ml = std::get_if<MultinomialLogistic>(&form_)) {
    const Eigen::VectorXd phi = expand_row(a_row);
    Eigen::VectorXd z = ml->W * phi + ml->b;
    const double zmax = z.maxCoeff();
    const double lse = zmax + std::log((z.array() - zmax).exp().sum());
    const int cls = static_cast<int>(y);
    if (cls < 0 || cls >= z.size() || y != std::floor(y))
      throw RuntimeError("cond_density: class code out of range");
    return z(cls) - lse;
  }
  const auto& o = std::get<Oracle>(form_);
  const auto [mean, var] = oracle_y_moments(o.spec, a_row);
  return gaussian_log_pdf(y, mean, var);
}

double CondDensity::logq_a_given_y(const Eigen::RowVectorXd& a_row,
                                   double y) const {
  if (direction_ != Direction::a_given_y)
    throw RuntimeError("cond_density: model is for Y given A");
  if (const auto* gm = std::get_if<GaussianMultivariate>(&form_)) {
    if (a_row.size() != gm->c.size())
      throw RuntimeError("cond_density: attribute row has wrong width");
    const Eigen::VectorXd d = a_row.transpose() - (gm->c + gm->g * y);
    const double p = static_cast<double>(gm->c.size());
    return -0.5 * p * std::log(kTwoPi) - 0.5 * gm->log_det -
           0.5 * d.dot(gm->sigma_inv * d);
  }
  const auto& o = std::get<Oracle>(form_);
  if (a_row.size() != static_cast<Eigen::Index>(a_cols_.size()))
    throw RuntimeError("cond_density: attribute row has wrong width");
  const Eigen::RowVectorXd u =
      o.cov_sqrt_inv.size() > 0 ? (a_row * o.cov_sqrt_inv).eval() : a_row;
  double lp = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j)
    lp += mixed_gamma_log_density(u(j));
  const auto [mean, var] = oracle_y_moments(o.spec, a_row);
  return lp + gaussian_log_pdf(y, mean, var);
}

double CondDensity::log_density(const Eigen::VectorXd& left,
                                const Eigen::VectorXd& right) const {
  if (direction_ == Direction::y_given_a) {
    if (left.size() != 1)
      throw RuntimeError("log_density: left side must be a scalar response");
    return logq_y_given_a(left(0), right.transpose());
  }
  if (right.size() != 1)
    throw RuntimeError("log_density: right side must be a scalar response");
  return logq_a_given_y(left.transpose(), right(0));
}

Eigen::MatrixXd CondDensity::log_density_matrix(const Eigen::MatrixXd& A,
                                                const Eigen::VectorXd& Y) const {
  const Eigen::Index n = A.rows();
  if (Y.size() != n)
    throw RuntimeError("log_density_matrix: A and Y row counts differ");
  if (A.cols() != static_cast<Eigen::Index>(a_cols_.size()))
    throw RuntimeError("log_density_matrix: attribute width mismatch");
  Eigen::MatrixXd M(n, n);

  if (direction_ == Direction::y_given_a) {
    if (const auto* gl = std::get_if<GaussianLinear>(&form_)) {
      const Eigen::MatrixXd phi =
          expand_attributes(A, a_cols_, OneHot::drop_first);
      const Eigen::VectorXd mean =
          (phi * gl->beta).array() + gl->intercept;
      const double norm = -0.5 * std::log(kTwoPi * gl->s2);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
          const double d = Y(j) - mean(i);
          M(i, j) = norm - 0.5 * d * d / gl->s2;
        }
      return M;
    }
    if (const auto* ml = std::get_if<MultinomialLogistic>(&form_)) {
      const Eigen::MatrixXd phi =
          expand_attributes(A, a_cols_, OneHot::drop_first);
      Eigen::MatrixXd Z = phi * ml->W.transpose();
      Z.rowwise() += ml->b.transpose();
      for (Eigen::Index i = 0; i < n; ++i) {
        const double zmax = Z.row(i).maxCoeff();
        const double lse =
            zmax + std::log((Z.row(i).array() - zmax).exp().sum());
        Z.row(i).array() -= lse;
      }
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          M(i, j) = Z(i, static_cast<int>(Y(j)));
      return M;
    }
    const auto& o = std::get<Oracle>(form_);
    Eigen::VectorXd mean(n);
    double var = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto [mu, v] = oracle_y_moments(o.spec, A.row(i));
      mean(i) = mu;
      var = v;
    }
    const double norm = -0.5 * std::log(kTwoPi * var);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double d = Y(j) - mean(i);
        M(i, j) = norm - 0.5 * d * d / var;
      }
    return M;
  }

  // a_given_y: expand the quadratic form so the table costs O(n^2 + n p^2).
  if (const auto* gm = std::get_if<GaussianMultivariate>(&form_)) {
    const Eigen::Index p = gm->c.size();
    const double norm =
        -0.5 * static_cast<double>(p) * std::log(kTwoPi) - 0.5 * gm->log_det;
    Eigen::MatrixXd centered = A.rowwise() - gm->c.transpose();
    const Eigen::MatrixXd si_centered = centered * gm->sigma_inv;
    Eigen::VectorXd qa(n), wa(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      qa(j) = si_centered.row(j).dot(centered.row(j));
      wa(j) = si_centered.row(j).dot(gm->g);
    }
    const double gg = gm->g.dot(gm->sigma_inv * gm->g);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        M(i, j) = norm - 0.5 * (qa(j) - 2.0 * Y(i) * wa(j) + Y(i) * Y(i) * gg);
    return M;
  }
  const auto& o = std::get<Oracle>(form_);
  const Eigen::MatrixXd U =
      o.cov_sqrt_inv.size() > 0 ? Eigen::MatrixXd(A * o.cov_sqrt_inv) : A;
  Eigen::VectorXd lp(n), mean(n);
  double var = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < U.cols(); ++k)
      s += mixed_gamma_log_density(U(j, k));
    lp(j) = s;
    const auto [mu, v] = oracle_y_moments(o.spec, A.row(j));
    mean(j) = mu;
    var = v;
  }
  const double norm = -0.5 * std::log(kTwoPi * var);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = Y(i) - mean(j);
      M(i, j) = lp(j) + norm - 0.5 * d * d / var;
    }
  return M;
}

nlohmann::json CondDensity::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["direction"] = direction_tag(direction_);
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : a_cols_)
    cols.push_back({{"name", c.name},
                    {"categorical", c.categorical},
                    {"levels", c.levels}});
  j["attr_columns"] = std::move(cols);

  if (const auto* gl = std::get_if<GaussianLinear>(&form_)) {
    j["form"] = "gaussian_linear";
    j["beta"] = vector_to_json(gl->beta);
    j["intercept"] = gl->intercept;
    j["s2"] = gl->s2;
  } else if (const auto* gm = std::get_if<GaussianMultivariate>(&form_)) {
    j["form"] = "gaussian_multivariate";
    j["c"] = vector_to_json(gm->c);
    j["g"] = vector_to_json(gm->g);
    j["sigma"] = matrix_to_json(gm->sigma);
  } else if (const auto* ml = std::get_if<MultinomialLogistic>(&form_)) {
    j["form"] = "multinomial_logistic";
    j["W"] = matrix_to_json(ml->W);
    j["b"] = vector_to_json(ml->b);
  } else {
    const auto& o = std::get<Oracle>(form_);
    j["form"] = "oracle";
    j["variant"] = variant_tag(o.spec.variant);
    j["K0"] = o.spec.K0;
    j["K"] = o.spec.K;
    j["w"] = o.spec.w;
    j["sigma_noise"] = o.spec.sigma;
    j["cov_sqrt"] = o.spec.cov_sqrt ? matrix_to_json(*o.spec.cov_sqrt)
                                    : nlohmann::json(nullptr);
  }
  return j;
}

CondDensity CondDensity::from_json(const nlohmann::json& j) {
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw ConfigError("cond_density: unsupported document version");
  std::vector<AttrColumn> cols;
  for (const auto& c : j.at("attr_columns"))
    cols.push_back(AttrColumn{c.at("name").get<std::string>(),
                              c.at("categorical").get<bool>(),
                              c.at("levels").get<int>()});
  const std::string form = j.at("form").get<std::string>();
  const std::string dir = j.at("direction").get<std::string>();

  if (form == "gaussian_linear") {
    GaussianLinear gl;
    gl.beta = vector_from_json(j.at("beta"));
    gl.intercept = j.at("intercept").get<double>();
    gl.s2 = j.at("s2").get<double>();
    return gaussian_linear(std::move(gl), std::move(cols));
  }
  if (form == "gaussian_multivariate") {
    return gaussian_multivariate(vector_from_json(j.at("c")),
                                 vector_from_json(j.at("g")),
                                 matrix_from_json(j.at("sigma")),
                                 std::move(cols));
  }
  if (form == "multinomial_logistic") {
    MultinomialLogistic ml;
    ml.W = matrix_from_json(j.at("W"));
    ml.b = vector_from_json(j.at("b"));
    return multinomial(std::move(ml), std::move(cols));
  }
  if (form == "oracle") {
    SimSpec spec;
    spec.variant = variant_from_tag(j.at("variant").get<std::string>());
    spec.K0 = j.at("K0").get<int>();
    spec.K = j.at("K").get<int>();
    spec.w = j.at("w").get<double>();
    spec.sigma = j.at("sigma_noise").get<double>();
    if (!j.at("cov_sqrt").is_null())
      spec.cov_sqrt = matrix_from_json(j.at("cov_sqrt"));
    return oracle(spec, dir == "a_given_y" ? Direction::a_given_y
                                           : Direction::y_given_a);
  }
  throw ConfigError("cond_density: unknown form '" + form + "'");
}

}  // namespace fairicp
