#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "fairicp/cond_density.hpp"

namespace fairicp {

enum class PermMethod { icp, cp, oracle_icp, oracle_cp, uniform };

// A conditionally permuted copy of the attribute rows. `pi` is the
// permutation actually applied: a_tilde.row(i) == A.row(pi[i]). The row
// multiset of a_tilde always equals the row multiset of A.
struct PermutedCopy {
  std::vector<int> pi;
  Eigen::MatrixXd a_tilde;
  PermMethod method = PermMethod::icp;
  int sweeps = 0;
};

// Swap log-odds for positions (i, j) under the current permutation.
using PairLogOdds =
    std::function<double(int i, int j, const std::vector<int>& pi)>;

// Pairwise Markov sampler: each sweep pairs the indices uniformly at random
// and swaps each pair with the supplied Bernoulli log-odds. Infinite
// log-odds select the corresponding branch deterministically; NaN is
// rejected.
std::vector<int> pairwise_sample(const PairLogOdds& log_odds, int n,
                                 int sweeps, std::uint64_t seed,
                                 const std::vector<int>& init);

// Permutation law restricted to the identity plus every transposition.
// atom 0 is the identity; atom 1 + t enumerates pairs (i, j), i < j, in
// lexicographic order.
struct RestrictedPermLaw {
  int n = 0;
  Eigen::VectorXd probs;  // length 1 + n(n-1)/2, sums to 1

  static int atom_count(int n) { return 1 + n * (n - 1) / 2; }
  static int atom_index(int n, int i, int j);  // i < j
};

// Runs the pairwise sampler against a fixed conditional-density table so
// repeated draws share the O(n^2) evaluation cost.
class PermutationSampler {
 public:
  // q must point in the direction the method needs: Y|A for icp, A|Y for cp.
  PermutationSampler(const CondDensity& q, const Eigen::MatrixXd& A,
                     const Eigen::VectorXd& Y, PermMethod method);

  PermutedCopy draw(int sweeps, std::uint64_t seed) const;

  // Exact restricted law of the target distribution.
  RestrictedPermLaw restricted_law() const;

  // Exact law over all n! permutations in lexicographic order (n <= 8).
  Eigen::VectorXd enumerate_exact() const;

  int n() const { return static_cast<int>(A_.rows()); }

 private:
  double swap_delta(int i, int j, const std::vector<int>& pi) const;

  Eigen::MatrixXd A_;
  Eigen::MatrixXd logq_;  // logq_(i, j): log q(Y_j|A_i) or log q(A_j|Y_i)
  PermMethod method_;
};

PermutedCopy sample_icp(const CondDensity& q, const Eigen::MatrixXd& A,
                        const Eigen::VectorXd& Y, int sweeps,
                        std::uint64_t seed);
PermutedCopy sample_cp(const CondDensity& q, const Eigen::MatrixXd& A,
                       const Eigen::VectorXd& Y, int sweeps,
                       std::uint64_t seed);
PermutedCopy sample_uniform(const Eigen::MatrixXd& A, std::uint64_t seed);

RestrictedPermLaw restricted_law(const CondDensity& q, const Eigen::MatrixXd& A,
                                 const Eigen::VectorXd& Y, PermMethod method);
Eigen::VectorXd enumerate_exact(const CondDensity& q, const Eigen::MatrixXd& A,
                                const Eigen::VectorXd& Y, PermMethod method);

// Total-variation distance between two laws on the same atom set.
double restricted_tv(const RestrictedPermLaw& law1,
                     const RestrictedPermLaw& law2);

// Rank of a permutation in lexicographic order (factorial number system);
// inverse of the enumeration order used by enumerate_exact.
std::uint64_t perm_rank(const std::vector<int>& pi);

std::vector<int> invert_permutation(const std::vector<int>& pi);

}  // namespace fairicp
