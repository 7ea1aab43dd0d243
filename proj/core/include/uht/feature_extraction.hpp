#pragma once

#include "uht/mismatched.hpp"
#include "uht/prob.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace uht {

/// p x |Z| optimization variable; row i is a function on the alphabet.
using FunctionMatrix = Eigen::MatrixXd;

/// The weighted-divergence objective maximized under a rank constraint.
struct ObjectiveSpec {
  Distribution pi0;
  std::vector<Distribution> alternates;  // pi_1 .. pi_p
  Eigen::VectorXd weights;               // gamma_i > 0
  int rank_bound = 1;                    // d <= min(p, |Z|)

  ObjectiveSpec(Distribution pi0_, std::vector<Distribution> alternates_,
                Eigen::VectorXd weights_, int rank_bound_);

  int p() const { return static_cast<int>(alternates.size()); }
  int alphabet_size() const { return pi0.size(); }
};

enum class SvpInit { zero, warm_start, given };

struct SvpConfig {
  double step = 0.0;       // alpha; must lie in (0, 2/L)
  double stop_eps = 1e-8;  // stop when ||X^{k+1} - X^k||_F <= stop_eps
  int max_iter = 5000;
  SvpInit init = SvpInit::warm_start;
  std::optional<FunctionMatrix> x0;  // used when init == given
};

struct SvpResult {
  FunctionMatrix x_star;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> step_norms;  // ||X^{k+1} - X^k||_F per iteration
};

/// (1/p) sum_i gamma_i (<pi_i, X_i> - log<pi0, e^{X_i}>), log-domain safe.
double objective_h(const ObjectiveSpec& spec, const FunctionMatrix& x);

/// Row i of the gradient is (gamma_i/p) (pi_i - tilt(pi0, X_i)).
FunctionMatrix gradient_h(const ObjectiveSpec& spec, const FunctionMatrix& x);

/// L = (1/p) max_i gamma_i.
double lipschitz_constant(const ObjectiveSpec& spec);

/// Best Frobenius rank-<=d approximation via truncated SVD.
FunctionMatrix svp_project(const FunctionMatrix& y, int d);

/// Gradient projection: Y = X + alpha grad, X' = svp_project(Y, d), iterated
/// until the step norm drops below stop_eps.
SvpResult svp_solve(const ObjectiveSpec& spec, const SvpConfig& cfg);

struct ExtractedBasis {
  FeatureBasis basis;
  bool dropped_constant = false;  // a singular direction was the constant
};

/// Right singular vectors of x_star with singular value above 1e-10 of the
/// largest, as an orthonormal basis. A singular vector proportional to the
/// constant function is removed (it cannot join a minimal basis).
ExtractedBasis extract_basis(const FunctionMatrix& x_star, int d);

}  // namespace uht
