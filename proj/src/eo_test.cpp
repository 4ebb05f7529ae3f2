#include "fairicp/eo_test.hpp"

#include <cmath>

#include "fairicp/errors.hpp"
#include "fairicp/perm_sampler.hpp"
#include "fairicp/rng.hpp"

namespace fairicp {

Eigen::MatrixXd statistic_attr_encoding(const Eigen::MatrixXd& A,
                                        const std::vector<AttrColumn>& a_cols,
                                        const std::vector<int>& subset) {
  if (subset.empty()) return expand_attributes(A, a_cols, OneHot::full);
  Eigen::MatrixXd sel(A.rows(), static_cast<Eigen::Index>(subset.size()));
  std::vector<AttrColumn> sel_cols;
  for (std::size_t t = 0; t < subset.size(); ++t) {
    const int j = subset[t];
    if (j < 0 || j >= A.cols())
      throw ConfigError("statistic: attribute column index out of range");
    sel.col(static_cast<Eigen::Index>(t)) = A.col(j);
    sel_cols.push_back(a_cols[static_cast<std::size_t>(j)]);
  }
  return expand_attributes(sel, sel_cols, OneHot::full);
}

Eigen::MatrixXd statistic_response_encoding(const Eigen::VectorXd& y,
                                            TaskKind task, int n_classes) {
  if (task == TaskKind::regression) return y;
  Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(y.size(), n_classes);
  for (Eigen::Index i = 0; i < y.size(); ++i)
    onehot(i, static_cast<int>(y(i))) = 1.0;
  return onehot;
}

double EoTestResult::p_from_counts(double t_star,
                                   const std::vector<double>& t_null) {
  int count = 0;
  for (double t : t_null)
    if (t >= t_star) ++count;
  return (1.0 + count) / (1.0 + static_cast<double>(t_null.size()));
}

EoTestResult eo_test(const EoInputs& in, const CondDensity& q, int copies,
                     std::uint64_t seed, const EoTestOptions& opts) {
  if (copies < 1) throw ConfigError("eo_test: need at least one copy");
  const Eigen::Index n = in.y.size();
  if (in.y_hat.rows() != n || in.A.rows() != n)
    throw RuntimeError("eo_test: row counts differ");
  if (q.direction() != Direction::y_given_a)
    throw RuntimeError("eo_test: q must model Y given A");

  const Eigen::MatrixXd W =
      statistic_response_encoding(in.y, in.task, in.n_classes);
  const Eigen::MatrixXd V =
      statistic_attr_encoding(in.A, in.a_cols, opts.stat_attr_cols);
  const Statistic stat =
      opts.statistic
          ? opts.statistic
          : Statistic([kpc = opts.kpc](const Eigen::MatrixXd& u,
                                       const Eigen::MatrixXd& v,
                                       const Eigen::MatrixXd& w) {
              return kpc_estimate(u, v, w, kpc);
            });

  EoTestResult result;
  result.copies = copies;
  result.seed = seed;
  result.statistic_tag = opts.statistic ? "custom" : "kpc";
  result.t_star = stat(in.y_hat, V, W);

  const PermutationSampler sampler(
      q, in.A, in.y, q.is_oracle() ? PermMethod::oracle_icp : PermMethod::icp);
  result.t_null.reserve(static_cast<std::size_t>(copies));
  Eigen::MatrixXd v_tilde(V.rows(), V.cols());
  for (int k = 0; k < copies; ++k) {
    const PermutedCopy copy = sampler.draw(opts.sweeps, mix_seed(seed, k));
    // Expansion is row-wise, so the copy's row reindexing carries over to V.
    for (Eigen::Index i = 0; i < V.rows(); ++i)
      v_tilde.row(i) = V.row(copy.pi[static_cast<std::size_t>(i)]);
    result.t_null.push_back(stat(in.y_hat, v_tilde, W));
  }
  result.p_value = EoTestResult::p_from_counts(result.t_star, result.t_null);
  return result;
}

double power_estimate(const std::function<EoScenario(std::uint64_t)>& make_case,
                      double alpha, int reps, int copies, std::uint64_t seed) {
  if (reps < 1) throw ConfigError("power_estimate: reps must be >= 1");
  int rejections = 0;
  for (int r = 0; r < reps; ++r) {
    const std::uint64_t rep_seed = mix_seed(seed, 0x9000 + r);
    const EoScenario scenario = make_case(rep_seed);
    const EoTestResult res = eo_test(scenario.inputs, scenario.q, copies,
                                     mix_seed(rep_seed, 0x77), scenario.opts);
    if (res.p_value < alpha) ++rejections;
  }
  return static_cast<double>(rejections) / static_cast<double>(reps);
}

}  // namespace fairicp
