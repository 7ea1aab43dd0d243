#include "uht/mismatched.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace uht {

namespace {

constexpr double kMinimalityCutoff = 1e-9;

Eigen::MatrixXd with_ones_row(const Eigen::MatrixXd& functions) {
  Eigen::MatrixXd m(functions.rows() + 1, functions.cols());
  m.row(0).setOnes();
  m.bottomRows(functions.rows()) = functions;
  return m;
}

bool full_rank(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() < std::min(m.rows(), m.cols())) return false;
  return m.rows() <= m.cols() &&
         sv[sv.size() - 1] > kMinimalityCutoff * sv[0];
}

// Objective with a pre-centered basis; logits = log pi + Psi^T r.
double objective_centered(const Eigen::VectorXd& mu_moments,
                          const Eigen::VectorXd& log_pi,
                          const Eigen::MatrixXd& psi,
                          const Eigen::VectorXd& r) {
  return mu_moments.dot(r) - logsumexp(log_pi + psi.transpose() * r);
}

}  // namespace

FeatureBasis::FeatureBasis(Alphabet alphabet, Eigen::MatrixXd functions)
    : alphabet_(alphabet), functions_(std::move(functions)) {
  if (functions_.cols() != alphabet_.size) {
    throw std::invalid_argument("FeatureBasis: column count must equal |Z|");
  }
  if (functions_.rows() < 1) {
    throw std::invalid_argument("FeatureBasis: need at least one row");
  }
  if (!functions_.allFinite()) {
    throw std::invalid_argument("FeatureBasis: entries must be finite");
  }
  if (!is_minimal(functions_)) {
    throw std::invalid_argument("FeatureBasis: {1, psi_1, ..., psi_d} must be linearly independent");
  }
}

bool FeatureBasis::is_minimal(const Eigen::MatrixXd& functions) {
  return full_rank(with_ones_row(functions));
}

double mismatched_objective(const Distribution& mu, const Distribution& pi,
                            const FeatureBasis& basis,
                            const Eigen::VectorXd& r) {
  if (!pi.full_support()) {
    throw std::invalid_argument("mismatched_objective: pi must have full support");
  }
  const Eigen::VectorXd f = basis.combine(r);
  return mu.probs().dot(f) -
         logsumexp(pi.probs().array().log().matrix() + f);
}

Eigen::VectorXd mismatched_gradient(const Distribution& mu,
                                    const Distribution& pi,
                                    const FeatureBasis& basis,
                                    const Eigen::VectorXd& r) {
  const Distribution tilted = tilt(pi, basis.combine(r));
  return basis.functions() * (mu.probs() - tilted.probs());
}

MismatchedSolution mismatched_divergence(const Distribution& mu,
                                         const Distribution& pi,
                                         const FeatureBasis& basis,
                                         const SolverConfig& cfg) {
  if (!pi.full_support()) {
    throw std::invalid_argument("mismatched_divergence: pi must have full support");
  }
  const int d = basis.dim();
  const int m = pi.size();

  // Center rows against pi; value-invariant, improves conditioning.
  Eigen::MatrixXd psi = basis.functions();
  psi.noalias() -= (basis.functions() * pi.probs()) *
                   Eigen::RowVectorXd::Ones(m);
  const Eigen::VectorXd log_pi = pi.probs().array().log().matrix();
  const Eigen::VectorXd mu_moments = psi * mu.probs();

  Eigen::VectorXd r = Eigen::VectorXd::Zero(d);
  double obj = 0.0;  // objective at r = 0
  MismatchedSolution sol;
  sol.r_star = r;

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    sol.iterations = iter;
    const Distribution tilted = tilt(pi, psi.transpose() * r);
    const Eigen::VectorXd grad = mu_moments - psi * tilted.probs();
    sol.grad_norm = grad.lpNorm<Eigen::Infinity>();
    if (sol.grad_norm <= cfg.grad_tol) break;

    // Hessian of the concave objective is -Cov_{tilted}(psi).
    const Eigen::VectorXd mean_psi = psi * tilted.probs();
    Eigen::MatrixXd cov =
        psi * tilted.probs().asDiagonal() * psi.transpose() -
        mean_psi * mean_psi.transpose();

    Eigen::VectorXd dir;
    double damping = 0.0;
    for (;;) {
      Eigen::MatrixXd h = cov;
      if (damping > 0.0) h.diagonal().array() += damping;
      Eigen::LLT<Eigen::MatrixXd> llt(h);
      if (llt.info() == Eigen::Success) {
        dir = llt.solve(grad);
        if (dir.allFinite() && dir.dot(grad) > 0.0) break;
      }
      damping = damping == 0.0 ? 1e-10 * (1.0 + cov.trace()) : damping * 10.0;
      if (damping > 1e12) {  // fall back to plain gradient ascent
        dir = grad;
        break;
      }
    }

    // Armijo backtracking.
    double step = 1.0;
    const double slope = grad.dot(dir);
    double new_obj = obj;
    Eigen::VectorXd r_new = r;
    bool improved = false;
    for (int ls = 0; ls < 60; ++ls) {
      r_new = r + step * dir;
      if (r_new.norm() > cfg.r_max) r_new *= cfg.r_max / r_new.norm();
      new_obj = objective_centered(mu_moments, log_pi, psi, r_new);
      if (std::isfinite(new_obj) && new_obj >= obj + 1e-4 * step * slope) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved || new_obj <= obj) {
      // No ascent left; at the norm cap this means the supremum is
      // approached at infinity.
      if (r.norm() >= cfg.r_max * (1.0 - 1e-9)) sol.boundary_hit = true;
      break;
    }
    r = r_new;
    obj = new_obj;
    if (r.norm() >= cfg.r_max * (1.0 - 1e-9)) {
      const Distribution t2 = tilt(pi, psi.transpose() * r);
      const Eigen::VectorXd g2 = mu_moments - psi * t2.probs();
      if (g2.dot(r) > 0.0) {  // gradient still pushes outward
        sol.boundary_hit = true;
        sol.grad_norm = g2.lpNorm<Eigen::Infinity>();
        break;
      }
    }
  }
  if (r.norm() >= cfg.r_max * (1.0 - 1e-9)) sol.boundary_hit = true;
  sol.r_star = r;
  sol.value = std::max(obj, 0.0);
  return sol;
}

LoglikBasisResult loglik_basis(const std::vector<Distribution>& alternates,
                               const Distribution& pi0) {
  if (!pi0.full_support()) {
    throw std::invalid_argument("loglik_basis: pi0 must have full support");
  }
  const int m = pi0.size();
  LoglikBasisResult out;
  Eigen::MatrixXd rows(0, m);
  for (std::size_t i = 0; i < alternates.size(); ++i) {
    const Distribution& alt = alternates[i];
    if (alt.size() != m) {
      throw std::invalid_argument("loglik_basis: size mismatch");
    }
    Eigen::VectorXd row(m);
    for (int z = 0; z < m; ++z) {
      if (alt.probs()[z] == 0.0) {
        // log(0/pi0) = -inf is not a usable basis entry; the spec of the
        // class needs finite functions.
        throw std::invalid_argument("loglik_basis: alternate not absolutely continuous w.r.t. pi0");
      }
      row[z] = std::log(alt.probs()[z] / pi0.probs()[z]);
    }
    Eigen::MatrixXd candidate(rows.rows() + 1, m);
    candidate.topRows(rows.rows()) = rows;
    candidate.row(rows.rows()) = row.transpose();
    if (FeatureBasis::is_minimal(candidate)) {
      rows = std::move(candidate);
      out.retained.push_back(static_cast<int>(i));
    }
  }
  out.functions = std::move(rows);
  return out;
}

bool in_exponential_family(const Distribution& candidate,
                           const Distribution& reference,
                           const FeatureBasis& basis, double tol) {
  if (!candidate.full_support() || !reference.full_support()) {
    throw std::invalid_argument("in_exponential_family: full support required");
  }
  const int m = reference.size();
  Eigen::VectorXd log_ratio =
      (candidate.probs().array() / reference.probs().array()).log().matrix();
  log_ratio.array() -= log_ratio.mean();
  Eigen::MatrixXd psi = basis.functions();
  for (int i = 0; i < psi.rows(); ++i) psi.row(i).array() -= psi.row(i).mean();
  const Eigen::VectorXd coeffs =
      psi.transpose().bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
          .solve(log_ratio);
  return (psi.transpose() * coeffs - log_ratio).norm() <= tol;
}

}  // namespace uht
