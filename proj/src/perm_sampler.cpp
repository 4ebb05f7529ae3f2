#include "fairicp/perm_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairicp/errors.hpp"
#include "fairicp/rng.hpp"

namespace fairicp {

namespace {

double swap_probability(double log_odds) {
  if (std::isnan(log_odds))
    throw RuntimeError("pairwise_sample: NaN swap log-odds");
  // sigmoid; the +-inf cases fall out as exactly 0 and 1
  if (log_odds >= 0.0) return 1.0 / (1.0 + std::exp(-log_odds));
  const double e = std::exp(log_odds);
  return e / (1.0 + e);
}

Eigen::MatrixXd reindex_rows(const Eigen::MatrixXd& A,
                             const std::vector<int>& pi) {
  Eigen::MatrixXd out(A.rows(), A.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    out.row(i) = A.row(pi[static_cast<std::size_t>(i)]);
  return out;
}

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

Eigen::VectorXd normalize_log_weights(Eigen::VectorXd logw) {
  const double shift = logw.maxCoeff();
  Eigen::VectorXd probs = (logw.array() - shift).exp();
  probs /= probs.sum();
  return probs;
}

}  // namespace

int RestrictedPermLaw::atom_index(int n, int i, int j) {
  if (!(0 <= i && i < j && j < n))
    throw RuntimeError("restricted law: bad transposition indices");
  return 1 + i * (2 * n - i - 1) / 2 + (j - i - 1);
}

std::vector<int> invert_permutation(const std::vector<int>& pi) {
  std::vector<int> inv(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i)
    inv[static_cast<std::size_t>(pi[i])] = static_cast<int>(i);
  return inv;
}

std::uint64_t perm_rank(const std::vector<int>& pi) {
  const int n = static_cast<int>(pi.size());
  std::uint64_t rank = 0;
  for (int i = 0; i < n; ++i) {
    int smaller_after = 0;
    for (int j = i + 1; j < n; ++j)
      if (pi[j] < pi[i]) ++smaller_after;
    rank += static_cast<std::uint64_t>(smaller_after) * factorial(n - 1 - i);
  }
  return rank;
}

std::vector<int> pairwise_sample(const PairLogOdds& log_odds, int n,
                                 int sweeps, std::uint64_t seed,
                                 const std::vector<int>& init) {
  if (n < 2) throw ConfigError("pairwise_sample: n must be >= 2");
  if (sweeps < 1) throw ConfigError("pairwise_sample: sweeps must be >= 1");
  if (static_cast<int>(init.size()) != n)
    throw ConfigError("pairwise_sample: init permutation has wrong length");

  std::vector<int> pi = init;
  Rng rng(seed);
  const int pairs = n / 2;
  for (int s = 0; s < sweeps; ++s) {
    const std::vector<int> order = rng.permutation(n);
    for (int k = 0; k < pairs; ++k) {
      const int i = order[2 * k];
      const int j = order[2 * k + 1];
      const double p = swap_probability(log_odds(i, j, pi));
      if (rng.uniform() < p) std::swap(pi[i], pi[j]);
    }
  }
  return pi;
}

PermutationSampler::PermutationSampler(const CondDensity& q,
                                       const Eigen::MatrixXd& A,
                                       const Eigen::VectorXd& Y,
                                       PermMethod method)
    : A_(A), method_(method) {
  if (A.rows() != Y.size())
    throw RuntimeError("sampler: A and Y row counts differ");
  if (method == PermMethod::uniform) {
    logq_ = Eigen::MatrixXd::Zero(A.rows(), A.rows());
    return;
  }
  const bool icp_like =
      method == PermMethod::icp || method == PermMethod::oracle_icp;
  if (icp_like && q.direction() != Direction::y_given_a)
    throw RuntimeError("sampler: icp needs a Y|A density");
  if (!icp_like && q.direction() != Direction::a_given_y)
    throw RuntimeError("sampler: cp needs an A|Y density");
  if (!icp_like) {
    for (const auto& c : q.attr_columns())
      if (c.categorical)
        throw RuntimeError("sampler: cp supports continuous attributes only");
  }
  logq_ = q.log_density_matrix(A, Y);
}

double PermutationSampler::swap_delta(int i, int j,
                                      const std::vector<int>& pi) const {
  // Density ratio of the swapped assignment against the current one; the
  // same expression serves both directions because logq_ already encodes
  // the method's orientation.
  return logq_(i, pi[static_cast<std::size_t>(j)]) +
         logq_(j, pi[static_cast<std::size_t>(i)]) -
         logq_(i, pi[static_cast<std::size_t>(i)]) -
         logq_(j, pi[static_cast<std::size_t>(j)]);
}

PermutedCopy PermutationSampler::draw(int sweeps, std::uint64_t seed) const {
  PermutedCopy copy;
  copy.method = method_;
  copy.sweeps = sweeps;
  const int size = n();
  if (method_ == PermMethod::uniform) {
    Rng rng(seed);
    copy.pi = rng.permutation(size);
    copy.a_tilde = reindex_rows(A_, copy.pi);
    return copy;
  }
  std::vector<int> identity(size);
  std::iota(identity.begin(), identity.end(), 0);
  const std::vector<int> tau = pairwise_sample(
      [this](int i, int j, const std::vector<int>& pi) {
        return swap_delta(i, j, pi);
      },
      size, sweeps, seed, identity);
  // The chain's stationary state tau weights assignments by the density of
  // (value tau(i) at position i); the inverse-permutation output rule turns
  // that into the inverse conditional law for icp, while cp applies tau
  // directly.
  const bool icp_like =
      method_ == PermMethod::icp || method_ == PermMethod::oracle_icp;
  copy.pi = icp_like ? invert_permutation(tau) : tau;
  copy.a_tilde = reindex_rows(A_, copy.pi);
  return copy;
}

RestrictedPermLaw PermutationSampler::restricted_law() const {
  const int size = n();
  if (size < 2) throw RuntimeError("restricted_law: n must be >= 2");
  RestrictedPermLaw law;
  law.n = size;
  Eigen::VectorXd logw(RestrictedPermLaw::atom_count(size));
  logw(0) = 0.0;  // identity reference
  for (int i = 0; i < size; ++i)
    for (int j = i + 1; j < size; ++j)
      logw(RestrictedPermLaw::atom_index(size, i, j)) =
          logq_(i, j) + logq_(j, i) - logq_(i, i) - logq_(j, j);
  law.probs = normalize_log_weights(std::move(logw));
  return law;
}

Eigen::VectorXd PermutationSampler::enumerate_exact() const {
  const int size = n();
  if (size < 1 || size > 8)
    throw ConfigError("enumerate_exact: n must lie in [1, 8]");
  const std::uint64_t total = factorial(size);
  Eigen::VectorXd logw(static_cast<Eigen::Index>(total));

  std::vector<int> pi(size);
  std::iota(pi.begin(), pi.end(), 0);
  const bool icp_like =
      method_ == PermMethod::icp || method_ == PermMethod::oracle_icp;
  std::uint64_t idx = 0;
  do {
    const std::vector<int> assign = icp_like ? invert_permutation(pi) : pi;
    double w = 0.0;
    for (int k = 0; k < size; ++k)
      w += logq_(k, assign[static_cast<std::size_t>(k)]);
    logw(static_cast<Eigen::Index>(idx++)) = w;
  } while (std::next_permutation(pi.begin(), pi.end()));
  return normalize_log_weights(std::move(logw));
}

PermutedCopy sample_icp(const CondDensity& q, const Eigen::MatrixXd& A,
                        const Eigen::VectorXd& Y, int sweeps,
                        std::uint64_t seed) {
  const PermMethod m =
      q.is_oracle() ? PermMethod::oracle_icp : PermMethod::icp;
  return PermutationSampler(q, A, Y, m).draw(sweeps, seed);
}

PermutedCopy sample_cp(const CondDensity& q, const Eigen::MatrixXd& A,
                       const Eigen::VectorXd& Y, int sweeps,
                       std::uint64_t seed) {
  const PermMethod m = q.is_oracle() ? PermMethod::oracle_cp : PermMethod::cp;
  return PermutationSampler(q, A, Y, m).draw(sweeps, seed);
}

PermutedCopy sample_uniform(const Eigen::MatrixXd& A, std::uint64_t seed) {
  PermutedCopy copy;
  copy.method = PermMethod::uniform;
  copy.sweeps = 0;
  Rng rng(seed);
  copy.pi = rng.permutation(static_cast<int>(A.rows()));
  copy.a_tilde = reindex_rows(A, copy.pi);
  return copy;
}

RestrictedPermLaw restricted_law(const CondDensity& q, const Eigen::MatrixXd& A,
                                 const Eigen::VectorXd& Y, PermMethod method) {
  return PermutationSampler(q, A, Y, method).restricted_law();
}

Eigen::VectorXd enumerate_exact(const CondDensity& q, const Eigen::MatrixXd& A,
                                const Eigen::VectorXd& Y, PermMethod method) {
  return PermutationSampler(q, A, Y, method).enumerate_exact();
}

double restricted_tv(const RestrictedPermLaw& law1,
                     const RestrictedPermLaw& law2) {
  if (law1.probs.size() != law2.probs.size())
    throw RuntimeError("restricted_tv: atom sets differ");
  return 0.5 * (law1.probs - law2.probs).cwiseAbs().sum();
}

}  // namespace fairicp
