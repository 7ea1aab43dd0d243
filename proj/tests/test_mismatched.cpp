#include "uht/mismatched.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace uht;

namespace {

FeatureBasis single_loglik_row(const Distribution& mu, const Distribution& pi) {
  const auto rows = loglik_basis({mu}, pi);
  REQUIRE(rows.retained.size() == 1);
  return FeatureBasis(Alphabet(pi.size()), rows.functions);
}

// Complete minimal class: indicators of points 1..|Z|-1.
FeatureBasis complete_basis(int m) {
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(m - 1, m);
  for (int i = 0; i < m - 1; ++i) rows(i, i) = 1.0;
  return FeatureBasis(Alphabet(m), rows);
}

}  // namespace

TEST_CASE("mismatched_objective at r = 0 is zero") {
  auto eng = make_engine({21, 0});
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 3 + static_cast<int>(eng() % 6);
    const int d = 1 + static_cast<int>(eng() % (m - 1));
    const Distribution mu = testutil::random_distribution(eng, m);
    const Distribution pi = testutil::random_distribution(eng, m);
    const FeatureBasis basis = testutil::random_basis(eng, m, d);
    CHECK(mismatched_objective(mu, pi, basis, Eigen::VectorXd::Zero(d)) ==
          doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("mismatched_objective with log-likelihood basis at r = 1 equals KL") {
  const Distribution mu{0.5, 0.5};
  const Distribution pi{0.25, 0.75};
  const FeatureBasis basis = single_loglik_row(mu, pi);
  Eigen::VectorXd r(1);
  r << 1.0;
  CHECK(mismatched_objective(mu, pi, basis, r) ==
        doctest::Approx(0.5 * std::log(4.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("mismatched_gradient matches central finite differences") {
  auto eng = make_engine({22, 0});
  std::normal_distribution<double> normal(0.0, 1.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 3 + static_cast<int>(eng() % 6);
    const int d = 1 + static_cast<int>(eng() % (m - 1));
    const Distribution mu = testutil::random_distribution(eng, m);
    const Distribution pi = testutil::random_distribution(eng, m);
    const FeatureBasis basis = testutil::random_basis(eng, m, d);
    Eigen::VectorXd r(d);
    for (int i = 0; i < d; ++i) r[i] = normal(eng);

    const Eigen::VectorXd grad = mismatched_gradient(mu, pi, basis, r);
    for (int i = 0; i < d; ++i) {
      Eigen::VectorXd rp = r, rm = r;
      rp[i] += h;
      rm[i] -= h;
      const double fd = (mismatched_objective(mu, pi, basis, rp) -
                         mismatched_objective(mu, pi, basis, rm)) /
                        (2.0 * h);
      CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("mismatched_divergence at mu = pi is zero") {
  auto eng = make_engine({23, 0});
  const Distribution pi = testutil::random_distribution(eng, 6);
  const FeatureBasis basis = testutil::random_basis(eng, 6, 3);
  const auto sol = mismatched_divergence(pi, pi, basis);
  CHECK(sol.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sol.r_star.norm() < 1e-7);
  CHECK_FALSE(sol.boundary_hit);
}

TEST_CASE("complete minimal basis attains KL") {
  const Distribution mu{0.5, 0.5};
  const Distribution pi{0.25, 0.75};
  const auto sol = mismatched_divergence(mu, pi, complete_basis(2));
  CHECK(sol.value == doctest::Approx(0.5 * std::log(4.0 / 3.0)).epsilon(1e-9));

  auto eng = make_engine({24, 0});
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 3 + static_cast<int>(eng() % 5);
    const Distribution a = testutil::random_distribution(eng, m);
    const Distribution b = testutil::random_distribution(eng, m);
    const auto full = mismatched_divergence(a, b, complete_basis(m));
    CHECK(full.value == doctest::Approx(kl_divergence(a, b)).epsilon(1e-8));
  }
}

TEST_CASE("log-likelihood basis attains KL for its own alternate") {
  auto eng = make_engine({25, 0});
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 3 + static_cast<int>(eng() % 8);
    const Distribution pi1 = testutil::random_distribution(eng, m);
    const Distribution pi0 = testutil::random_distribution(eng, m);
    const FeatureBasis basis = single_loglik_row(pi1, pi0);
    const auto sol = mismatched_divergence(pi1, pi0, basis);
    CHECK(sol.value ==
          doctest::Approx(kl_divergence(pi1, pi0)).epsilon(1e-8));
  }
}

TEST_CASE("moment matching at the solution") {
  auto eng = make_engine({26, 0});
  const Distribution mu = testutil::random_distribution(eng, 7);
  const Distribution pi = testutil::random_distribution(eng, 7);
  const FeatureBasis basis = testutil::random_basis(eng, 7, 3);
  SolverConfig cfg;
  const auto sol = mismatched_divergence(mu, pi, basis, cfg);
  REQUIRE_FALSE(sol.boundary_hit);
  const Distribution tilted = tilt(pi, basis.combine(sol.r_star));
  const Eigen::VectorXd gap =
      basis.functions() * (mu.probs() - tilted.probs());
  CHECK(gap.lpNorm<Eigen::Infinity>() <= cfg.grad_tol);
}

TEST_CASE("mismatched divergence bounded by KL and monotone in the class") {
  auto eng = make_engine({27, 0});
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 4 + static_cast<int>(eng() % 5);
    const Distribution mu = testutil::random_distribution(eng, m);
    const Distribution pi = testutil::random_distribution(eng, m);
    const FeatureBasis small = testutil::random_basis(eng, m, 2);

    const double kl = kl_divergence(mu, pi);
    const double dmm_small = mismatched_divergence(mu, pi, small).value;
    CHECK(dmm_small >= 0.0);
    CHECK(dmm_small <= kl + 1e-9);

    // Append a row: the restricted supremum can only grow.
    for (int attempt = 0;; ++attempt) {
      REQUIRE(attempt < 50);
      Eigen::MatrixXd bigger(3, m);
      bigger.topRows(2) = small.functions();
      bigger.row(2) = testutil::random_basis(eng, m, 1).functions();
      if (!FeatureBasis::is_minimal(bigger)) continue;
      const double dmm_big =
          mismatched_divergence(mu, pi, FeatureBasis(Alphabet(m), bigger)).value;
      CHECK(dmm_big >= dmm_small - 1e-9);
      CHECK(dmm_big <= kl + 1e-9);
      break;
    }
  }
}

TEST_CASE("objective invariant to constant row shifts") {
  auto eng = make_engine({28, 0});
  const int m = 6;
  const Distribution mu = testutil::random_distribution(eng, m);
  const Distribution pi = testutil::random_distribution(eng, m);
  const FeatureBasis basis = testutil::random_basis(eng, m, 2);

  Eigen::MatrixXd shifted_rows = basis.functions();
  shifted_rows.row(0).array() += 3.7;
  const FeatureBasis shifted(Alphabet(m), shifted_rows);

  Eigen::VectorXd r(2);
  r << 0.8, -1.3;
  // Shifting psi_1 by c changes the objective at the same r by nothing:
  // both terms pick up c r_1 and they cancel.
  CHECK(mismatched_objective(mu, pi, basis, r) ==
        doctest::Approx(mismatched_objective(mu, pi, shifted, r)).epsilon(1e-12));
  CHECK(mismatched_divergence(mu, pi, basis).value ==
        doctest::Approx(mismatched_divergence(mu, pi, shifted).value)
            .epsilon(1e-9));
}

TEST_CASE("boundary hit when the supremum is at infinity") {
  // Empirical-style mu missing support: with the indicator feature the
  // objective increases without bound.
  const Distribution mu{1.0, 0.0};
  const Distribution pi{0.5, 0.5};
  Eigen::MatrixXd rows(1, 2);
  rows << 1.0, 0.0;
  const FeatureBasis basis(Alphabet(2), rows);
  SolverConfig cfg;
  cfg.r_max = 10.0;
  const auto sol = mismatched_divergence(mu, pi, basis, cfg);
  CHECK(sol.boundary_hit);
  // Capped value approaches D(mu || pi) = log 2 from below.
  CHECK(sol.value <= std::log(2.0) + 1e-12);
  CHECK(sol.value > 0.5);
}

TEST_CASE("loglik_basis") {
  const Distribution pi0{0.25, 0.75};

  SUBCASE("alternate equal to pi0 gives an empty retained set") {
    const auto res = loglik_basis({pi0}, pi0);
    CHECK(res.retained.empty());
    CHECK(res.functions.rows() == 0);
  }

  SUBCASE("elementwise logs") {
    const auto res = loglik_basis({Distribution{0.5, 0.5}}, pi0);
    REQUIRE(res.retained == std::vector<int>{0});
    CHECK(res.functions(0, 0) == doctest::Approx(std::log(2.0)));
    CHECK(res.functions(0, 1) == doctest::Approx(std::log(2.0 / 3.0)));
  }

  SUBCASE("collinear alternate dropped") {
    auto eng = make_engine({29, 0});
    const Distribution base = testutil::random_distribution(eng, 5);
    const FeatureBasis psi1 = single_loglik_row(
        testutil::random_distribution(eng, 5), base);
    const Distribution pi1 = tilt(base, psi1.functions().row(0).transpose());
    const Distribution pi2 =
        tilt(base, 2.0 * psi1.functions().row(0).transpose());
    const auto res = loglik_basis({pi1, pi2}, base);
    CHECK(res.retained == std::vector<int>{0});
  }

  SUBCASE("absolute continuity enforced") {
    const Distribution full{0.5, 0.25, 0.25};
    const Distribution gappy{0.5, 0.5, 0.0};
    CHECK_THROWS_AS(loglik_basis({gappy}, full), std::invalid_argument);
  }
}

TEST_CASE("in_exponential_family") {
  auto eng = make_engine({30, 0});
  const int m = 6;
  const Distribution ref = testutil::random_distribution(eng, m);
  const FeatureBasis basis = testutil::random_basis(eng, m, 2);

  CHECK(in_exponential_family(ref, ref, basis, 1e-9));

  const Eigen::VectorXd f = 3.0 * basis.functions().row(0).transpose() -
                            basis.functions().row(1).transpose();
  CHECK(in_exponential_family(tilt(ref, f), ref, basis, 1e-9));

  // Build a log-ratio orthogonal to the centered span (and to constants).
  Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
  v[0] = 1.0;
  Eigen::MatrixXd span(3, m);
  span.row(0).setOnes();
  span.bottomRows(2) = basis.functions();
  for (int i = 0; i < 3; ++i) {
    const Eigen::VectorXd row = span.row(i).transpose();
    v -= (v.dot(row) / row.squaredNorm()) * row;
    // crude Gram-Schmidt against a non-orthogonal set; repeat below
  }
  for (int pass = 0; pass < 20; ++pass) {
    for (int i = 0; i < 3; ++i) {
      const Eigen::VectorXd row = span.row(i).transpose();
      v -= (v.dot(row) / row.squaredNorm()) * row;
    }
  }
  REQUIRE(v.norm() > 1e-8);
  CHECK_FALSE(in_exponential_family(tilt(ref, v), ref, basis, 1e-7));
}

TEST_CASE("perfect approximation when alternates live in the family") {
  auto eng = make_engine({31, 0});
  const int m = 7;
  const Distribution pi0 = testutil::random_distribution(eng, m);
  const FeatureBasis basis = testutil::random_basis(eng, m, 2);
  std::normal_distribution<double> normal(0.0, 0.7);

  std::vector<Distribution> members{pi0};
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd r(2);
    r << normal(eng), normal(eng);
    members.push_back(tilt(pi0, basis.combine(r)));
  }
  for (const auto& pi : members) {
    CHECK(in_exponential_family(pi, pi0, basis, 1e-8));
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (i == j) continue;
      const double kl = kl_divergence(members[i], members[j]);
      const double dmm =
          mismatched_divergence(members[i], members[j], basis).value;
      CHECK(dmm == doctest::Approx(kl).epsilon(1e-7));
    }
  }
}

TEST_CASE("basis minimality enforced") {
  Eigen::MatrixXd constant_row(1, 3);
  constant_row << 2.0, 2.0, 2.0;
  CHECK_THROWS_AS(FeatureBasis(Alphabet(3), constant_row),
                  std::invalid_argument);

  Eigen::MatrixXd dup(2, 3);
  dup << 1.0, 0.0, 0.0, 2.0, 1.0, 1.0;  // second = 2*1 - first... dependent with ones
  CHECK_FALSE(FeatureBasis::is_minimal(dup));
}
