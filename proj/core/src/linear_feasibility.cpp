#include "linear_feasibility.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace uht::detail {

namespace {
constexpr double kTol = 1e-9;
}

bool linear_system_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& c) {
  const int m = static_cast<int>(a.rows());
  const int k = static_cast<int>(a.cols());
  if (c.size() != m) throw std::invalid_argument("linear_system_feasible: size mismatch");
  if (m == 0) return true;

  // Standard form: v = u - w with u, w >= 0; slack s >= 0 turns A v >= c
  // into A u - A w - s = c. Rows with negative right-hand side are negated,
  // then each row gets an artificial variable forming the initial basis.
  const int n = 2 * k + m + m;  // u, w, slack, artificial
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, n + 1);
  for (int i = 0; i < m; ++i) {
    const double sign = c[i] < 0.0 ? -1.0 : 1.0;
    t.block(i, 0, 1, k) = sign * a.row(i);
    t.block(i, k, 1, k) = -sign * a.row(i);
    t(i, 2 * k + i) = -sign;          // slack
    t(i, 2 * k + m + i) = 1.0;        // artificial
    t(i, n) = sign * c[i];
  }

  // Phase-1 row: sum of artificials = w_rhs - sum_j w_j x_j.
  Eigen::RowVectorXd w = t.colwise().sum();
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = 2 * k + m + i;

  const int max_pivots = 20000;
  for (int pivots = 0; pivots < max_pivots; ++pivots) {
    // Bland: smallest non-artificial column with positive phase-1 coefficient.
    int pcol = -1;
    for (int j = 0; j < 2 * k + m; ++j) {
      if (w[j] > kTol) {
        pcol = j;
        break;
      }
    }
    if (pcol < 0) break;

    int prow = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (t(i, pcol) > kTol) {
        const double ratio = t(i, n) / t(i, pcol);
        if (ratio < best_ratio - kTol ||
            (ratio < best_ratio + kTol && (prow < 0 || basis[i] < basis[prow]))) {
          best_ratio = ratio;
          prow = i;
        }
      }
    }
    if (prow < 0) return false;  // unbounded phase-1 direction; cannot happen

    t.row(prow) /= t(prow, pcol);
    for (int i = 0; i < m; ++i) {
      if (i != prow && std::abs(t(i, pcol)) > 0.0) {
        t.row(i) -= t(i, pcol) * t.row(prow);
      }
    }
    w -= w[pcol] * t.row(prow);
    basis[prow] = pcol;
  }

  return w[n] <= kTol;  // residual artificial mass
}

}  // namespace uht::detail
