#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "fairicp/errors.hpp"
#include "fairicp/perm_sampler.hpp"
#include "fairicp/rng.hpp"
#include "support/test_utils.hpp"

using namespace fairicp;
namespace tu = fairicp::testutil;

namespace {

bool is_bijection(const std::vector<int>& pi) {
  std::vector<int> sorted = pi;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != static_cast<int>(i)) return false;
  return true;
}

// Row multisets compared through sorted row keys.
bool same_row_multiset(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  auto keys = [](const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      std::vector<double> r(m.cols());
      for (Eigen::Index j = 0; j < m.cols(); ++j) r[j] = m(i, j);
      rows.push_back(std::move(r));
    }
    std::sort(rows.begin(), rows.end());
    return rows;
  };
  return keys(a) == keys(b);
}

}  // namespace

TEST_CASE("pairwise sampler: constant density gives the uniform law") {
  const int n = 4;
  const int draws = 20000;
  const int sweeps = 500;
  std::vector<int> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  const PairLogOdds flat = [](int, int, const std::vector<int>&) {
    return 0.0;
  };

  std::map<std::uint64_t, int> counts;
  for (int d = 0; d < draws; ++d) {
    const auto pi = pairwise_sample(flat, n, sweeps, mix_seed(1, d), identity);
    REQUIRE(is_bijection(pi));
    counts[perm_rank(pi)]++;
  }
  // TV against uniform over the 24 permutations, plus a chi-square check.
  const double expected = draws / 24.0;
  double tv = 0.0, chi2 = 0.0;
  for (std::uint64_t r = 0; r < 24; ++r) {
    const double c = counts.count(r) ? counts[r] : 0.0;
    tv += 0.5 * std::abs(c / draws - 1.0 / 24.0);
    chi2 += (c - expected) * (c - expected) / expected;
  }
  CHECK(tv <= 0.02);
  CHECK(chi2 < tu::kChi2_999_df23);
}

TEST_CASE("pairwise sampler edge behavior") {
  std::vector<int> init = {1, 0, 2};
  CHECK_THROWS_AS(pairwise_sample([](int, int, const std::vector<int>&) {
                    return 0.0;
                  },
                                  3, 0, 1, init),
                  ConfigError);

  // All-reject odds leave the initial permutation untouched.
  const auto out = pairwise_sample(
      [](int, int, const std::vector<int>&) {
        return -std::numeric_limits<double>::infinity();
      },
      3, 1, 5, init);
  CHECK(out == init);

  CHECK_THROWS_AS(pairwise_sample(
                      [](int, int, const std::vector<int>&) {
                        return std::numeric_limits<double>::quiet_NaN();
                      },
                      3, 1, 5, init),
                  RuntimeError);
}

TEST_CASE("pairwise sampler: two-state chain hits its stationary law") {
  // Odds 3:1 in favor of the swap state; stationary mass on swap is 0.75.
  const double log3 = std::log(3.0);
  const PairLogOdds odds = [&](int, int, const std::vector<int>& pi) {
    return pi[0] == 0 ? log3 : -log3;
  };
  std::vector<int> identity = {0, 1};
  const int draws = 7500, sweeps = 50;
  int swapped = 0;
  for (int d = 0; d < draws; ++d) {
    const auto pi = pairwise_sample(odds, 2, sweeps, mix_seed(2, d), identity);
    if (pi[0] == 1) ++swapped;
  }
  const double freq = static_cast<double>(swapped) / draws;
  CHECK(std::abs(freq - 0.75) < 0.01);
}

TEST_CASE("detailed balance of the swap odds") {
  const auto joint = tu::GaussianJoint::example(2, 7);
  const Dataset ds = joint.sample(6, 8);
  const CondDensity q = joint.q_y_given_a();
  const Eigen::MatrixXd logq = q.log_density_matrix(ds.A, ds.Y);

  // For any state and any pair, the swap odds equal the target-density ratio
  // of the two assignments.
  Rng rng(9);
  std::vector<int> pi = rng.permutation(6);
  auto target = [&](const std::vector<int>& state) {
    double w = 0.0;
    for (int k = 0; k < 6; ++k) w += logq(k, state[k]);
    return w;
  };
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) {
      std::vector<int> swapped = pi;
      std::swap(swapped[i], swapped[j]);
      const double delta = logq(i, pi[j]) + logq(j, pi[i]) - logq(i, pi[i]) -
                           logq(j, pi[j]);
      CHECK(delta == doctest::Approx(target(swapped) - target(pi)).epsilon(1e-10));
    }
}

TEST_CASE("restricted law basics") {
  const auto joint = tu::GaussianJoint::example(1, 17);
  const Dataset ds = joint.sample(5, 18);

  SUBCASE("constant density: every atom equal") {
    CondDensity::GaussianLinear flat;
    flat.beta = Eigen::VectorXd::Zero(1);
    flat.intercept = 0.0;
    flat.s2 = 1.0;
    const CondDensity q =
        CondDensity::gaussian_linear(flat, {AttrColumn::continuous("a1")});
    Dataset flat_y = ds;
    flat_y.Y.setConstant(1.25);  // equal densities for every assignment
    const RestrictedPermLaw law =
        restricted_law(q, flat_y.A, flat_y.Y, PermMethod::icp);
    const int atoms = RestrictedPermLaw::atom_count(5);
    REQUIRE(law.probs.size() == atoms);
    for (int t = 0; t < atoms; ++t)
      CHECK(law.probs(t) == doctest::Approx(1.0 / atoms).epsilon(1e-12));
  }

  SUBCASE("independent A and Y gives the uniform law for both methods") {
    CondDensity::GaussianLinear indep;
    indep.beta = Eigen::VectorXd::Zero(1);  // q(y|a) free of a
    indep.intercept = 0.5;
    indep.s2 = 2.0;
    const CondDensity q =
        CondDensity::gaussian_linear(indep, {AttrColumn::continuous("a1")});
    const RestrictedPermLaw law =
        restricted_law(q, ds.A, ds.Y, PermMethod::icp);
    const int atoms = RestrictedPermLaw::atom_count(5);
    for (int t = 0; t < atoms; ++t)
      CHECK(law.probs(t) == doctest::Approx(1.0 / atoms).epsilon(1e-12));
  }

  SUBCASE("probabilities sum to one") {
    const CondDensity q = joint.q_y_given_a();
    const RestrictedPermLaw law =
        restricted_law(q, ds.A, ds.Y, PermMethod::oracle_icp);
    CHECK(law.probs.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(law.probs.minCoeff() >= 0.0);
  }
}

TEST_CASE("restricted_tv is a metric on the atom simplex") {
  RestrictedPermLaw a, b, c;
  a.n = b.n = c.n = 3;
  a.probs = Eigen::VectorXd::Zero(4);
  b.probs = Eigen::VectorXd::Zero(4);
  a.probs(0) = 1.0;  // point mass on identity
  b.probs(1) = 1.0;  // point mass on swap(0,1)
  CHECK(restricted_tv(a, a) == 0.0);
  CHECK(restricted_tv(a, b) == 1.0);

  Rng rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd pa(4), pb(4), pc(4);
    for (int i = 0; i < 4; ++i) {
      pa(i) = rng.uniform_pos();
      pb(i) = rng.uniform_pos();
      pc(i) = rng.uniform_pos();
    }
    a.probs = pa / pa.sum();
    b.probs = pb / pb.sum();
    c.probs = pc / pc.sum();
    const double ab = restricted_tv(a, b);
    const double ba = restricted_tv(b, a);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-15));
    CHECK(ab <= restricted_tv(a, c) + restricted_tv(c, b) + 1e-12);
  }

  RestrictedPermLaw other;
  other.n = 4;
  other.probs = Eigen::VectorXd::Constant(7, 1.0 / 7.0);
  CHECK_THROWS_AS(restricted_tv(a, other), RuntimeError);
}

TEST_CASE("enumerate_exact: reference laws") {
  SUBCASE("constant density: six equal masses at n=3") {
    CondDensity::GaussianLinear flat;
    flat.beta = Eigen::VectorXd::Zero(1);
    flat.intercept = 0.0;
    flat.s2 = 1.0;
    const CondDensity q =
        CondDensity::gaussian_linear(flat, {AttrColumn::continuous("a1")});
    Eigen::MatrixXd A = Eigen::MatrixXd::Random(3, 1);
    Eigen::VectorXd Y = Eigen::VectorXd::Constant(3, 0.4);
    const Eigen::VectorXd law = enumerate_exact(q, A, Y, PermMethod::icp);
    REQUIRE(law.size() == 6);
    for (int i = 0; i < 6; ++i)
      CHECK(law(i) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  }

  SUBCASE("restriction of the exact law matches restricted_law") {
    const auto joint = tu::GaussianJoint::example(2, 31);
    const Dataset ds = joint.sample(5, 32);
    const CondDensity q = joint.q_y_given_a();
    const Eigen::VectorXd full =
        enumerate_exact(q, ds.A, ds.Y, PermMethod::oracle_icp);
    const RestrictedPermLaw law =
        restricted_law(q, ds.A, ds.Y, PermMethod::oracle_icp);

    // Pick out the identity and transposition ranks, renormalize.
    std::vector<int> pi(5);
    Eigen::VectorXd sub(RestrictedPermLaw::atom_count(5));
    std::iota(pi.begin(), pi.end(), 0);
    sub(0) = full(static_cast<Eigen::Index>(perm_rank(pi)));
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j) {
        std::iota(pi.begin(), pi.end(), 0);
        std::swap(pi[i], pi[j]);
        sub(RestrictedPermLaw::atom_index(5, i, j)) =
            full(static_cast<Eigen::Index>(perm_rank(pi)));
      }
    sub /= sub.sum();
    for (int t = 0; t < sub.size(); ++t)
      CHECK(sub(t) == doctest::Approx(law.probs(t)).epsilon(1e-12));
  }

  SUBCASE("n=1 single atom; n>8 rejected") {
    const auto joint = tu::GaussianJoint::example(1, 33);
    const Dataset ds = joint.sample(1, 34);
    const CondDensity q = joint.q_y_given_a();
    const Eigen::VectorXd law = enumerate_exact(q, ds.A, ds.Y, PermMethod::icp);
    REQUIRE(law.size() == 1);
    CHECK(law(0) == 1.0);

    const Dataset big = joint.sample(9, 35);
    CHECK_THROWS_AS(enumerate_exact(q, big.A, big.Y, PermMethod::icp),
                    ConfigError);
  }
}

TEST_CASE("icp and cp agree under the true conditionals") {
  // Same joint evaluated through both factorizations; the restricted laws
  // must coincide.
  for (std::uint64_t seed : {41u, 42u, 43u}) {
    const auto joint = tu::GaussianJoint::example(3, seed);
    const Dataset ds = joint.sample(40, seed + 100);
    const CondDensity q_icp = joint.q_y_given_a();
    const CondDensity q_cp = joint.q_a_given_y();
    const RestrictedPermLaw icp =
        restricted_law(q_icp, ds.A, ds.Y, PermMethod::oracle_icp);
    const RestrictedPermLaw cp =
        restricted_law(q_cp, ds.A, ds.Y, PermMethod::oracle_cp);
    CHECK((icp.probs - cp.probs).cwiseAbs().maxCoeff() < 1e-10);
  }

  // The same duality holds for the mixed-Gamma generator through its
  // unnormalized joint.
  SimSpec spec;
  spec.variant = SimVariant::quality;
  spec.K0 = 2;
  spec.K = 1;
  spec.w = 0.6;
  spec.sigma = 1.0;
  spec.cov_sqrt = make_cov_sqrt(3, 1.0, 5.0, 44);
  spec.seed = 45;
  const Dataset ds = gen_quality_dataset(spec, 30);
  const RestrictedPermLaw icp =
      restricted_law(CondDensity::oracle(spec, Direction::y_given_a), ds.A,
                     ds.Y, PermMethod::oracle_icp);
  const RestrictedPermLaw cp =
      restricted_law(CondDensity::oracle(spec, Direction::a_given_y), ds.A,
                     ds.Y, PermMethod::oracle_cp);
  CHECK((icp.probs - cp.probs).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("sampled copies: structure invariants") {
  const auto joint = tu::GaussianJoint::example(3, 51);
  const Dataset ds = joint.sample(25, 52);
  const CondDensity q = joint.q_y_given_a();

  for (int rep = 0; rep < 5; ++rep) {
    const PermutedCopy copy = sample_icp(q, ds.A, ds.Y, 50, mix_seed(53, rep));
    CHECK(is_bijection(copy.pi));
    CHECK(same_row_multiset(copy.a_tilde, ds.A));
    for (int i = 0; i < 25; ++i)
      CHECK(copy.a_tilde.row(i) == ds.A.row(copy.pi[i]));
  }

  const CondDensity q_cp = joint.q_a_given_y();
  const PermutedCopy cp_copy = sample_cp(q_cp, ds.A, ds.Y, 50, 54);
  CHECK(is_bijection(cp_copy.pi));
  CHECK(same_row_multiset(cp_copy.a_tilde, ds.A));

  const PermutedCopy uni = sample_uniform(ds.A, 55);
  CHECK(is_bijection(uni.pi));
  CHECK(same_row_multiset(uni.a_tilde, ds.A));

  // Determinism per seed.
  const PermutedCopy a = sample_icp(q, ds.A, ds.Y, 50, 56);
  const PermutedCopy b = sample_icp(q, ds.A, ds.Y, 50, 56);
  CHECK(a.pi == b.pi);
}

TEST_CASE("cp with a forbidden swap keeps the identity") {
  // A | Y=y ~ N(y, 1e-8) and two observations 100 apart: the cross
  // assignment density q(A_1|Y_2) q(A_2|Y_1) underflows to exactly zero, so
  // the swap is never accepted.
  const CondDensity q = CondDensity::gaussian_multivariate(
      Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1),
      Eigen::MatrixXd::Constant(1, 1, 1e-8),
      {AttrColumn::continuous("a1")});
  Eigen::MatrixXd A(2, 1);
  A << 0.0, 100.0;
  Eigen::VectorXd Y(2);
  Y << 0.0, 100.0;
  for (int rep = 0; rep < 10; ++rep) {
    const PermutedCopy copy = sample_cp(q, A, Y, 50, mix_seed(57, rep));
    CHECK(copy.pi == std::vector<int>{0, 1});
    CHECK(copy.a_tilde == A);
  }
}

TEST_CASE("sampled law converges to the enumerated law (small case)") {
  // Cheap version of the exactness check: n=4, fewer draws; the acceptance
  // suite runs the full n=5 configuration.
  const auto joint = tu::GaussianJoint::example(2, 61);
  const Dataset ds = joint.sample(4, 62);
  const CondDensity q = joint.q_y_given_a();
  const Eigen::VectorXd exact =
      enumerate_exact(q, ds.A, ds.Y, PermMethod::oracle_icp);

  const PermutationSampler sampler(q, ds.A, ds.Y, PermMethod::oracle_icp);
  const int draws = 8000;
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(24);
  for (int d = 0; d < draws; ++d) {
    const PermutedCopy copy = sampler.draw(100, mix_seed(63, d));
    counts(static_cast<Eigen::Index>(perm_rank(copy.pi))) += 1.0;
  }
  const double tv = 0.5 * (counts / draws - exact).cwiseAbs().sum();
  CHECK(tv <= 0.05);
}

TEST_CASE("uniform baseline law is uniform") {
  const auto joint = tu::GaussianJoint::example(1, 71);
  const Dataset ds = joint.sample(4, 72);
  const CondDensity q = joint.q_y_given_a();
  const PermutationSampler sampler(q, ds.A, ds.Y, PermMethod::uniform);
  const Eigen::VectorXd law = sampler.enumerate_exact();
  for (int i = 0; i < 24; ++i)
    CHECK(law(i) == doctest::Approx(1.0 / 24.0).epsilon(1e-12));
}
