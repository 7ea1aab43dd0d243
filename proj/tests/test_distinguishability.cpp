#include "uht/distinguishability.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace uht;

TEST_CASE("f_epsilon_set") {
  Eigen::Vector3d x(3.0, 2.9, 1.0);
  CHECK(f_epsilon_set(x, 0.2).members == std::vector<int>{1, 2});
  CHECK(f_epsilon_set(x, 0.05).members == std::vector<int>{1});
  CHECK(f_epsilon_set(Eigen::Vector4d::Constant(2.0), 0.3).members ==
        std::vector<int>{1, 2, 3, 4});
  CHECK_THROWS_AS(f_epsilon_set(x, 0.0), std::invalid_argument);
}

TEST_CASE("f_epsilon_set monotone in epsilon") {
  auto eng = make_engine({81, 0});
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd x(6);
    for (int z = 0; z < 6; ++z) x[z] = normal(eng);
    const double e1 = 0.1 + uniform01(eng);
    const double e2 = e1 + uniform01(eng);
    const auto small = f_epsilon_set(x, e1);
    const auto large = f_epsilon_set(x, e2);
    for (int z : small.members) CHECK(large.contains(z));
  }
}

TEST_CASE("is_epsilon_extremal") {
  CHECK(is_epsilon_extremal(Distribution{0.0, 1.0, 0.0}, 0.5));
  CHECK(is_epsilon_extremal(Distribution{0.25, 0.25, 0.25, 0.25}, 0.1));
  CHECK_FALSE(is_epsilon_extremal(Distribution{0.5, 0.3, 0.2}, 0.1));
}

TEST_CASE("is_epsilon_distinguishable") {
  const Distribution a{0.5, 0.5, 0.0};
  const Distribution b{0.0, 0.5, 0.5};
  CHECK(is_epsilon_distinguishable(a, b, 0.1));
  CHECK(is_epsilon_distinguishable(b, a, 0.1));  // symmetry
  CHECK_FALSE(is_epsilon_distinguishable(a, a, 0.1));
  // Nested level sets fail one of the two difference conditions.
  CHECK_FALSE(is_epsilon_distinguishable(Distribution{0.6, 0.4},
                                         Distribution{0.9, 0.1}, 0.05));
}

TEST_CASE("certify_family") {
  CHECK(certify_family({Distribution{0.0, 1.0}}, 0.3));
  CHECK_FALSE(certify_family(
      {Distribution{0.0, 1.0}, Distribution{0.0, 1.0}}, 0.3));
  CHECK(certify_family(construct_two_dim_family(Alphabet(8), 50.0), 0.01));
}

TEST_CASE("construct_two_dim_basis") {
  const FeatureBasis basis = construct_two_dim_basis(Alphabet(4));
  Eigen::Vector4d psi1(3, 2, 1, 0), psi2(1.0, 1.5, 1.75, 1.875);
  CHECK((basis.functions().row(0).transpose() - psi1).norm() < 1e-15);
  CHECK((basis.functions().row(1).transpose() - psi2).norm() < 1e-15);
  CHECK(FeatureBasis::is_minimal(basis.functions()));

  // argmax of u_k = psi_1 + 2^{k-1/2} psi_2 moves through every point.
  for (int m : {4, 8, 12}) {
    const FeatureBasis b = construct_two_dim_basis(Alphabet(m));
    for (int k = 1; k <= m; ++k) {
      const Eigen::VectorXd u = b.functions().row(0).transpose() +
                                std::pow(2.0, k - 0.5) *
                                    b.functions().row(1).transpose();
      int argmax = 0;
      u.maxCoeff(&argmax);
      CHECK(argmax + 1 == k);
    }
  }
}

TEST_CASE("construct_two_dim_family") {
  const auto family = construct_two_dim_family(Alphabet(8), 50.0);
  REQUIRE(family.size() == 8);
  for (int k = 1; k <= 8; ++k) {
    int argmax = 0;
    family[k - 1].probs().maxCoeff(&argmax);
    CHECK(argmax + 1 == k);
  }
  // Small beta degenerates toward uniform; the family is then not
  // distinguishable at small epsilon.
  CHECK_FALSE(certify_family(construct_two_dim_family(Alphabet(8), 1e-6), 0.01));
}

TEST_CASE("doubling search certifies N(2) >= |Z| for every small alphabet") {
  for (int m = 2; m <= 16; ++m) {
    const double beta = find_certifying_beta(Alphabet(m), 0.01, 1.0, 1e3);
    CHECK(beta > 0.0);
    CHECK(beta <= 1e3);
  }
}

TEST_CASE("construct_indicator_basis") {
  const FeatureBasis basis = construct_indicator_basis(Alphabet(3), 2);
  Eigen::MatrixXd expected(2, 3);
  expected << 1, 0, 0, 0, 1, 0;
  CHECK(basis.functions() == expected);
  CHECK_THROWS_AS(construct_indicator_basis(Alphabet(3), 4),
                  std::invalid_argument);
}

namespace {

// Witness for the binomial lower bound: uniform on each floor(d/2)-subset of
// {1..d}, sharpened by beta-tilting along the indicator rows.
std::vector<Distribution> indicator_witness(int m, int d, double beta) {
  const int half = d / 2;
  std::vector<Distribution> family;
  std::vector<int> subset(half);
  for (int i = 0; i < half; ++i) subset[i] = i;
  for (;;) {
    Eigen::VectorXd logits = Eigen::VectorXd::Zero(m);
    for (int i : subset) logits[i] = beta;
    family.push_back(normalize_from_logits(logits));
    int i = half - 1;
    while (i >= 0 && subset[i] == d - half + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < half; ++j) subset[j] = subset[j - 1] + 1;
  }
  return family;
}

std::uint64_t binomial(int n, int k) {
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("indicator construction realizes the binomial lower bound") {
  const int d = 4, m = 6;
  const auto family = indicator_witness(m, d, 40.0);
  CHECK(family.size() == binomial(d, d / 2));  // 6 = C(4,2)
  CHECK(certify_family(family, 0.01));
}

TEST_CASE("construct_kronecker_basis") {
  SUBCASE("d=2 reduces to the two-function basis on the first block") {
    const FeatureBasis kron = construct_kronecker_basis(Alphabet(5), 2);
    const FeatureBasis base = construct_two_dim_basis(Alphabet(5));
    CHECK((kron.functions() - base.functions()).norm() < 1e-15);
  }

  SUBCASE("d=4, |Z|=8 block structure") {
    const FeatureBasis kron = construct_kronecker_basis(Alphabet(8), 4);
    REQUIRE(kron.dim() == 4);
    const FeatureBasis base = construct_two_dim_basis(Alphabet(4));
    // Row 1 carries psi_1 on block 0, row 2 on block 1; rows 3, 4 the same
    // for psi_2. Off-block entries vanish.
    for (int i = 0; i < 4; ++i) {
      CHECK(kron.functions()(0, i) == base.functions()(0, i));
      CHECK(kron.functions()(1, 4 + i) == base.functions()(0, i));
      CHECK(kron.functions()(2, i) == base.functions()(1, i));
      CHECK(kron.functions()(3, 4 + i) == base.functions()(1, i));
      CHECK(kron.functions()(0, 4 + i) == 0.0);
      CHECK(kron.functions()(1, i) == 0.0);
      CHECK(kron.functions()(2, 4 + i) == 0.0);
      CHECK(kron.functions()(3, i) == 0.0);
    }
  }

  SUBCASE("product family passes certification") {
    // One two-function witness per block: distribution (k1, k2) peaks at
    // point k1 of block 0 and is built from block-0 logits only, shifted
    // into block 1 for the second coordinate.
    const int m = 8, d = 4;
    const int half = d / 2;
    const int block = m / half;  // 4
    const FeatureBasis base = construct_two_dim_basis(Alphabet(block));
    const double beta = 200.0;
    std::vector<Distribution> family;
    for (int k1 = 1; k1 <= block; ++k1) {
      for (int k2 = 1; k2 <= block; ++k2) {
        Eigen::VectorXd logits = Eigen::VectorXd::Constant(m, -1e3);
        const Eigen::VectorXd u1 =
            base.functions().row(0).transpose() +
            std::pow(2.0, k1 - 0.5) * base.functions().row(1).transpose();
        const Eigen::VectorXd u2 =
            base.functions().row(0).transpose() +
            std::pow(2.0, k2 - 0.5) * base.functions().row(1).transpose();
        for (int i = 0; i < block; ++i) {
          logits[i] = beta * (u1[i] - u1.maxCoeff());
          logits[block + i] = beta * (u2[i] - u2.maxCoeff());
        }
        family.push_back(normalize_from_logits(logits));
      }
    }
    CHECK(family.size() >=
          static_cast<std::size_t>(
              std::ceil(std::exp((d / 2) * (std::log(block) - 1.0)))));
    CHECK(certify_family(family, 0.01));
  }
}

TEST_CASE("bound formulas") {
  CHECK(lower_bound(2, 8) == doctest::Approx(8.0 / std::exp(1.0)).epsilon(1e-12));
  CHECK(upper_bound(2, 8) ==
        doctest::Approx(std::pow(8.0 * std::exp(1.0) / 3.0, 3)).epsilon(1e-12));
  CHECK(upper_bound(1, 2) == doctest::Approx(std::exp(2.0)).epsilon(1e-12));

  for (int m = 2; m <= 64; ++m) {
    for (int d = 1; d <= m; ++d) {
      CHECK(lower_bound(d, m) <= upper_bound(d, m));
    }
  }
  CHECK(lower_bound(2, 16) > lower_bound(2, 8));  // monotone in |Z|
}

TEST_CASE("count_halfspace_subsets on a 1-d ramp") {
  Eigen::MatrixXd ramp(1, 3);
  ramp << 1.0, 2.0, 3.0;
  const FeatureBasis basis(Alphabet(3), ramp);
  // Half-spaces on collinear points carve prefixes, suffixes, the full set
  // and the empty set: {}, {1}, {3}, {1,2}, {2,3}, {1,2,3}.
  CHECK(count_halfspace_subsets(basis) == 6);
}

TEST_CASE("count_halfspace_subsets within the Sauer bound") {
  for (int m : {6, 8}) {
    const FeatureBasis basis = construct_two_dim_basis(Alphabet(m));
    const auto count = count_halfspace_subsets(basis);
    CHECK(count >= static_cast<std::uint64_t>(m));  // singleton argmax sets
    CHECK(static_cast<double>(count) <= upper_bound(2, m));
  }
}

TEST_CASE("level-set chain: realizable sets <= tau <= Sauer") {
  auto eng = make_engine({82, 0});
  for (int trial = 0; trial < 4; ++trial) {
    const int m = 6 + static_cast<int>(eng() % 5);  // up to 10
    const int d = 1 + static_cast<int>(eng() % 3);
    const FeatureBasis basis = testutil::random_basis(eng, m, d);

    // Sample level sets over random (r, epsilon).
    std::set<std::vector<int>> seen;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int s = 0; s < 400; ++s) {
      Eigen::VectorXd r(d);
      for (int i = 0; i < d; ++i) r[i] = normal(eng);
      const double eps = 0.01 + 2.0 * uniform01(eng);
      seen.insert(f_epsilon_set(basis.combine(r), eps).members);
    }
    const auto tau = count_halfspace_subsets(basis);
    CHECK(seen.size() <= tau);
    if (m >= d + 1) {
      CHECK(static_cast<double>(tau) <= upper_bound(d, m));
    }
  }
}
