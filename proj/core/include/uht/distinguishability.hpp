#pragma once

#include "uht/mismatched.hpp"
#include "uht/prob.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace uht {

/// Points within epsilon of the maximum of a function on the alphabet.
struct LevelSet {
  std::vector<int> members;  // 1-based, sorted ascending
  double epsilon = 0.0;
  Eigen::VectorXd source;

  bool contains(int z) const;
};

/// F^eps(x) = {z : x(z) >= max x - eps}; ties at the threshold are included.
LevelSet f_epsilon_set(const Eigen::VectorXd& x, double epsilon);

/// pi(F^eps(pi)) >= 1 - eps, with F^eps applied to pi's own probabilities.
bool is_epsilon_extremal(const Distribution& pi, double epsilon);

/// Both level-set differences nonempty.
bool is_epsilon_distinguishable(const Distribution& pi1,
                                const Distribution& pi2, double epsilon);

/// Every member eps-extremal and every pair eps-distinguishable.
bool certify_family(const std::vector<Distribution>& dists, double epsilon);

/// The two-function basis psi_1(k) = |Z|-k, psi_2(k) = 2 - 2^{1-k}.
FeatureBasis construct_two_dim_basis(const Alphabet& alphabet);

/// |Z| distributions proportional to exp(beta u_k), u_k = psi_1 +
/// 2^{k-0.5} psi_2; distribution k peaks at point k.
std::vector<Distribution> construct_two_dim_family(const Alphabet& alphabet,
                                                   double beta);

/// Indicator functions of points 1..d.
FeatureBasis construct_indicator_basis(const Alphabet& alphabet, int d);

/// Block construction: with J = floor(|Z| / floor(d/2)) and the two-function
/// basis on J points, row k restricts psi_1 to block k and row
/// k + floor(d/2) restricts psi_2; points beyond floor(d/2)*J are zero
/// everywhere.
FeatureBasis construct_kronecker_basis(const Alphabet& alphabet, int d);

/// exp(floor(d/2) [log |Z| - log floor(d/2) - 1]).
double lower_bound(int d, int alphabet_size);

/// exp((d+1)(1 + log |Z| - log(d+1))) = (e|Z|/(d+1))^{d+1}.
double upper_bound(int d, int alphabet_size);

/// Number of subsets of the basis column points {y_i} in R^d realizable by
/// half-spaces, counted by exhaustive LP feasibility with a unit separation
/// margin (scale-invariant, so equivalent to strict separation). Limited to
/// |Z| <= 20.
std::uint64_t count_halfspace_subsets(const FeatureBasis& basis);

/// Doubling search for a beta making certify_family pass on the two-function
/// family; returns the first power-of-two multiple of beta_start that works,
/// or a negative value if none does by beta_limit.
double find_certifying_beta(const Alphabet& alphabet, double epsilon,
                            double beta_start = 1.0, double beta_limit = 1e6);

}  // namespace uht
