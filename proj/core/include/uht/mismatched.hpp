#pragma once

#include "uht/prob.hpp"

#include <Eigen/Core>

#include <vector>

namespace uht {

/// A linear function class on a finite alphabet: row i of `functions` is the
/// basis function psi_i. Minimality ({1, psi_1, ..., psi_d} linearly
/// independent) is enforced at construction via a relative singular-value
/// cutoff of 1e-9.
class FeatureBasis {
 public:
  FeatureBasis(Alphabet alphabet, Eigen::MatrixXd functions);

  const Alphabet& alphabet() const { return alphabet_; }
  const Eigen::MatrixXd& functions() const { return functions_; }
  int dim() const { return static_cast<int>(functions_.rows()); }

  /// f_r = sum_i r_i psi_i as a vector over the alphabet.
  Eigen::VectorXd combine(const Eigen::VectorXd& r) const {
    return functions_.transpose() * r;
  }

  /// True iff prepending an all-ones row leaves the matrix full rank.
  static bool is_minimal(const Eigen::MatrixXd& functions);

 private:
  Alphabet alphabet_;
  Eigen::MatrixXd functions_;
};

struct SolverConfig {
  double grad_tol = 1e-9;
  int max_iter = 200;
  double r_max = 1e3;
};

/// Result of maximizing the mismatched-divergence objective.
struct MismatchedSolution {
  double value = 0.0;            // D^MM
  Eigen::VectorXd r_star;        // optimizer
  double grad_norm = 0.0;        // inf-norm of the gradient at r_star
  bool boundary_hit = false;     // ||r|| reached r_max (supremum at infinity)
  int iterations = 0;
};

/// <mu, f_r> - log<pi, e^{f_r}>, log-domain safe. Requires pi full support.
double mismatched_objective(const Distribution& mu, const Distribution& pi,
                            const FeatureBasis& basis, const Eigen::VectorXd& r);

/// Gradient of the objective in r: <mu, psi> - <tilt(pi, f_r), psi>.
Eigen::VectorXd mismatched_gradient(const Distribution& mu,
                                    const Distribution& pi,
                                    const FeatureBasis& basis,
                                    const Eigen::VectorXd& r);

/// Maximizes the concave objective by safeguarded Newton (Levenberg damping,
/// Armijo backtracking). The basis is centered against pi internally, which
/// leaves the value unchanged.
MismatchedSolution mismatched_divergence(const Distribution& mu,
                                         const Distribution& pi,
                                         const FeatureBasis& basis,
                                         const SolverConfig& cfg = {});

/// Log-likelihood ratio basis with dependent rows dropped.
struct LoglikBasisResult {
  Eigen::MatrixXd functions;   // retained rows log(pi_i / pi0)
  std::vector<int> retained;   // 0-based indices into `alternates`
};

/// Rows log(pi_i/pi0) for each alternate; rows that break minimality are
/// dropped greedily and the retained index set reported. Each alternate must
/// be absolutely continuous w.r.t. pi0.
LoglikBasisResult loglik_basis(const std::vector<Distribution>& alternates,
                               const Distribution& pi0);

/// True iff candidate lies in the exponential family E(reference, span basis):
/// the centered log-ratio is within tol (least-squares residual) of the span
/// of the centered basis rows. Both distributions must have full support.
bool in_exponential_family(const Distribution& candidate,
                           const Distribution& reference,
                           const FeatureBasis& basis, double tol);

}  // namespace uht
