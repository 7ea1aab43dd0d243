#include "uht/distinguishability.hpp"

#include "linear_feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uht {

bool LevelSet::contains(int z) const {
  return std::binary_search(members.begin(), members.end(), z);
}

LevelSet f_epsilon_set(const Eigen::VectorXd& x, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("f_epsilon_set: epsilon must be > 0");
  if (!x.allFinite()) throw std::invalid_argument("f_epsilon_set: x must be finite");
  LevelSet set;
  set.epsilon = epsilon;
  set.source = x;
  const double cut = x.maxCoeff() - epsilon;
  for (int z = 0; z < x.size(); ++z) {
    if (x[z] >= cut) set.members.push_back(z + 1);
  }
  return set;
}

bool is_epsilon_extremal(const Distribution& pi, double epsilon) {
  const LevelSet set = f_epsilon_set(pi.probs(), epsilon);
  double mass = 0.0;
  for (int z : set.members) mass += pi(z);
  return mass >= 1.0 - epsilon;
}

bool is_epsilon_distinguishable(const Distribution& pi1,
                                const Distribution& pi2, double epsilon) {
  const LevelSet f1 = f_epsilon_set(pi1.probs(), epsilon);
  const LevelSet f2 = f_epsilon_set(pi2.probs(), epsilon);
  auto has_exclusive = [](const LevelSet& a, const LevelSet& b) {
    return std::any_of(a.members.begin(), a.members.end(),
                       [&](int z) { return !b.contains(z); });
  };
  return has_exclusive(f1, f2) && has_exclusive(f2, f1);
}

bool certify_family(const std::vector<Distribution>& dists, double epsilon) {
  for (const Distribution& pi : dists) {
    if (!is_epsilon_extremal(pi, epsilon)) return false;
  }
  for (std::size_t i = 0; i < dists.size(); ++i) {
    for (std::size_t j = i + 1; j < dists.size(); ++j) {
      if (!is_epsilon_distinguishable(dists[i], dists[j], epsilon)) return false;
    }
  }
  return true;
}

namespace {

Eigen::MatrixXd two_dim_rows(int m) {
  Eigen::MatrixXd psi(2, m);
  for (int k = 1; k <= m; ++k) {
    psi(0, k - 1) = static_cast<double>(m - k);
    psi(1, k - 1) = 2.0 - std::pow(2.0, 1 - k);  // partial geometric sums
  }
  return psi;
}

}  // namespace

FeatureBasis construct_two_dim_basis(const Alphabet& alphabet) {
  // Minimality of {1, psi_1, psi_2} needs |Z| >= 3; the FeatureBasis
  // constructor rejects |Z| = 2.
  return FeatureBasis(alphabet, two_dim_rows(alphabet.size));
}

std::vector<Distribution> construct_two_dim_family(const Alphabet& alphabet,
                                                   double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("construct_two_dim_family: beta must be > 0");
  const Eigen::MatrixXd psi = two_dim_rows(alphabet.size);
  std::vector<Distribution> family;
  family.reserve(alphabet.size);
  for (int k = 1; k <= alphabet.size; ++k) {
    const Eigen::VectorXd u =
        psi.row(0).transpose() + std::pow(2.0, k - 0.5) * psi.row(1).transpose();
    family.push_back(normalize_from_logits(beta * u));
  }
  return family;
}

FeatureBasis construct_indicator_basis(const Alphabet& alphabet, int d) {
  if (d < 1 || d > alphabet.size) {
    throw std::invalid_argument("construct_indicator_basis: need 1 <= d <= |Z|");
  }
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(d, alphabet.size);
  for (int k = 0; k < d; ++k) psi(k, k) = 1.0;
  return FeatureBasis(alphabet, std::move(psi));
}

FeatureBasis construct_kronecker_basis(const Alphabet& alphabet, int d) {
  if (d < 2 || alphabet.size < d) {
    throw std::invalid_argument("construct_kronecker_basis: need 2 <= d <= |Z|");
  }
  const int half = d / 2;
  const int block = alphabet.size / half;  // J
  if (block < 2) {
    throw std::invalid_argument("construct_kronecker_basis: blocks too small");
  }
  const FeatureBasis base = construct_two_dim_basis(Alphabet(block));
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(2 * half, alphabet.size);
  for (int k = 0; k < half; ++k) {
    for (int i = 0; i < block; ++i) {
      psi(k, k * block + i) = base.functions()(0, i);
      psi(k + half, k * block + i) = base.functions()(1, i);
    }
  }
  return FeatureBasis(alphabet, std::move(psi));
}

double lower_bound(int d, int alphabet_size) {
  if (d < 1 || alphabet_size < 2) {
    throw std::invalid_argument("lower_bound: need d >= 1 and |Z| >= 2");
  }
  const double half = std::floor(d / 2.0);
  if (half < 1.0) return 1.0;  // floor(d/2) = 0, vacuous exponent
  return std::exp(half * (std::log(static_cast<double>(alphabet_size)) -
                          std::log(half) - 1.0));
}

double upper_bound(int d, int alphabet_size) {
  if (d < 1 || alphabet_size < 2) {
    throw std::invalid_argument("upper_bound: need d >= 1 and |Z| >= 2");
  }
  return std::exp((d + 1) *
                  (1.0 + std::log(static_cast<double>(alphabet_size)) -
                   std::log(static_cast<double>(d + 1))));
}

std::uint64_t count_halfspace_subsets(const FeatureBasis& basis) {
  const int m = basis.alphabet().size;
  if (m > 20) {
    throw std::invalid_argument("count_halfspace_subsets: alphabet too large for enumeration (|Z| <= 20)");
  }
  const int d = basis.dim();
  // Column points y_i in R^d; subset I is realizable iff some (r, b)
  // strictly separates it from the complement. The constraint set is
  // scale-invariant in (r, b), so a unit margin is equivalent to strict
  // separation.
  std::uint64_t count = 0;
  const std::uint64_t total = std::uint64_t{1} << m;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    Eigen::MatrixXd a(m, d + 1);
    Eigen::VectorXd c(m);
    for (int i = 0; i < m; ++i) {
      const Eigen::VectorXd y = basis.functions().col(i);
      if (mask & (std::uint64_t{1} << i)) {
        a.row(i).head(d) = y.transpose();  // r.y - b >= 0
        a(i, d) = -1.0;
        c[i] = 0.0;
      } else {
        a.row(i).head(d) = -y.transpose();  // -r.y + b >= 1
        a(i, d) = 1.0;
        c[i] = 1.0;
      }
    }
    if (detail::linear_system_feasible(a, c)) ++count;
  }
  return count;
}

double find_certifying_beta(const Alphabet& alphabet, double epsilon,
                            double beta_start, double beta_limit) {
  for (double beta = beta_start; beta <= beta_limit; beta *= 2.0) {
    if (certify_family(construct_two_dim_family(alphabet, beta), epsilon)) {
      return beta;
    }
  }
  return -1.0;
}

}  // namespace uht
