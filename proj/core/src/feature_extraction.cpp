#include "uht/feature_extraction.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace uht {

namespace {

constexpr double kRankCutoff = 1e-10;

Eigen::VectorXd row_logits(const Distribution& pi0,
                           const FunctionMatrix& x, int i) {
  return pi0.probs().array().log().matrix() + x.row(i).transpose();
}

}  // namespace

ObjectiveSpec::ObjectiveSpec(Distribution pi0_,
                             std::vector<Distribution> alternates_,
                             Eigen::VectorXd weights_, int rank_bound_)
    : pi0(std::move(pi0_)),
      alternates(std::move(alternates_)),
      weights(std::move(weights_)),
      rank_bound(rank_bound_) {
  if (!pi0.full_support()) {
    throw std::invalid_argument("ObjectiveSpec: pi0 must have full support");
  }
  if (alternates.empty()) {
    throw std::invalid_argument("ObjectiveSpec: need at least one alternate");
  }
  if (weights.size() != static_cast<Eigen::Index>(alternates.size()) ||
      (weights.array() <= 0.0).any()) {
    throw std::invalid_argument("ObjectiveSpec: need one positive weight per alternate");
  }
  if (rank_bound < 1 ||
      rank_bound > std::min<int>(p(), pi0.size())) {
    throw std::invalid_argument("ObjectiveSpec: rank bound must be in [1, min(p, |Z|)]");
  }
  for (const Distribution& alt : alternates) {
    if (alt.size() != pi0.size()) {
      throw std::invalid_argument("ObjectiveSpec: alternate size mismatch");
    }
    const double div = kl_divergence(alt, pi0);
    if (!(div > 0.0) || !std::isfinite(div)) {
      throw std::invalid_argument("ObjectiveSpec: need 0 < D(pi_i || pi0) < inf for every alternate");
    }
  }
}

double objective_h(const ObjectiveSpec& spec, const FunctionMatrix& x) {
  if (x.rows() != spec.p() || x.cols() != spec.alphabet_size()) {
    throw std::invalid_argument("objective_h: dimension mismatch");
  }
  double sum = 0.0;
  for (int i = 0; i < spec.p(); ++i) {
    sum += spec.weights[i] *
           (spec.alternates[i].probs().dot(x.row(i).transpose()) -
            logsumexp(row_logits(spec.pi0, x, i)));
  }
  return sum / spec.p();
}

FunctionMatrix gradient_h(const ObjectiveSpec& spec, const FunctionMatrix& x) {
  if (x.rows() != spec.p() || x.cols() != spec.alphabet_size()) {
    throw std::invalid_argument("gradient_h: dimension mismatch");
  }
  FunctionMatrix g(spec.p(), spec.alphabet_size());
  for (int i = 0; i < spec.p(); ++i) {
    const Distribution tilted = tilt(spec.pi0, x.row(i).transpose());
    g.row(i) = (spec.weights[i] / spec.p()) *
               (spec.alternates[i].probs() - tilted.probs()).transpose();
  }
  return g;
}

double lipschitz_constant(const ObjectiveSpec& spec) {
  return spec.weights.maxCoeff() / spec.p();
}

FunctionMatrix svp_project(const FunctionMatrix& y, int d) {
  if (d < 1) throw std::invalid_argument("svp_project: d must be >= 1");
  if (d >= std::min(y.rows(), y.cols())) return y;
  Eigen::BDCSVD<FunctionMatrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  return svd.matrixU().leftCols(d) * sv.head(d).asDiagonal() *
         svd.matrixV().leftCols(d).transpose();
}

SvpResult svp_solve(const ObjectiveSpec& spec, const SvpConfig& cfg) {
  const double lip = lipschitz_constant(spec);
  if (!(cfg.step > 0.0) || !(cfg.step < 2.0 / lip)) {
    throw std::invalid_argument("svp_solve: step must lie in (0, 2/L)");
  }
  if (cfg.stop_eps <= 0.0 || cfg.max_iter < 1) {
    throw std::invalid_argument("svp_solve: invalid stopping parameters");
  }
  const int d = spec.rank_bound;

  FunctionMatrix x;
  switch (cfg.init) {
    case SvpInit::zero:
      x = FunctionMatrix::Zero(spec.p(), spec.alphabet_size());
      break;
    case SvpInit::warm_start: {
      // Project the unconstrained optimum (rows = log-likelihood ratios).
      FunctionMatrix w(spec.p(), spec.alphabet_size());
      for (int i = 0; i < spec.p(); ++i) {
        w.row(i) = (spec.alternates[i].probs().array() /
                    spec.pi0.probs().array())
                       .log()
                       .matrix()
                       .transpose();
      }
      x = svp_project(w, d);
      break;
    }
    case SvpInit::given:
      if (!cfg.x0 || cfg.x0->rows() != spec.p() ||
          cfg.x0->cols() != spec.alphabet_size()) {
        throw std::invalid_argument("svp_solve: init=given needs a matching x0");
      }
      x = svp_project(*cfg.x0, d);
      break;
  }

  SvpResult res;
  for (int k = 0; k < cfg.max_iter; ++k) {
    const FunctionMatrix y = x + cfg.step * gradient_h(spec, x);
    FunctionMatrix x_next = svp_project(y, d);
    const double step_norm = (x_next - x).norm();
    res.step_norms.push_back(step_norm);
    x = std::move(x_next);
    res.iterations = k + 1;
    if (step_norm <= cfg.stop_eps) {
      res.converged = true;
      break;
    }
  }
  res.x_star = std::move(x);
  res.objective = objective_h(spec, res.x_star);
  return res;
}

ExtractedBasis extract_basis(const FunctionMatrix& x_star, int d) {
  Eigen::BDCSVD<FunctionMatrix> svd(x_star,
                                    Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0.0) {
    throw std::invalid_argument("extract_basis: matrix is numerically zero");
  }
  const int m = static_cast<int>(x_star.cols());
  int keep = 0;
  while (keep < std::min<int>(d, static_cast<int>(sv.size())) &&
         sv[keep] > kRankCutoff * sv[0]) {
    ++keep;
  }
  if (keep == 0) {
    throw std::invalid_argument("extract_basis: matrix is numerically zero");
  }

  bool dropped = false;
  Eigen::MatrixXd rows(0, m);
  const Eigen::VectorXd ones_dir = Eigen::VectorXd::Constant(m, 1.0 / std::sqrt(m));
  for (int j = 0; j < keep; ++j) {
    const Eigen::VectorXd v = svd.matrixV().col(j);
    if (std::abs(v.dot(ones_dir)) > 1.0 - 1e-10) {
      dropped = true;  // constant direction, incompatible with minimality
      continue;
    }
    rows.conservativeResize(rows.rows() + 1, m);
    rows.row(rows.rows() - 1) = v.transpose();
  }
  // The ones vector may lie in the span of several retained vectors even
  // when no single one is proportional to it; drop the most constant-aligned
  // row until minimality holds.
  while (rows.rows() > 0 && !FeatureBasis::is_minimal(rows)) {
    int worst = 0;
    double worst_dot = -1.0;
    for (int i = 0; i < rows.rows(); ++i) {
      const double a = std::abs(rows.row(i).dot(ones_dir.transpose()));
      if (a > worst_dot) {
        worst_dot = a;
        worst = i;
      }
    }
    Eigen::MatrixXd reduced(rows.rows() - 1, m);
    reduced.topRows(worst) = rows.topRows(worst);
    reduced.bottomRows(rows.rows() - 1 - worst) =
        rows.bottomRows(rows.rows() - 1 - worst);
    rows = std::move(reduced);
    dropped = true;
  }
  if (rows.rows() == 0) {
    throw std::invalid_argument("extract_basis: only the constant direction remains");
  }
  return ExtractedBasis{FeatureBasis(Alphabet(m), std::move(rows)), dropped};
}

}  // namespace uht
