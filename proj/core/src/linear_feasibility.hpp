#pragma once

#include <Eigen/Core>

namespace uht::detail {

/// Decides whether the system A v >= c has a solution with v free, by a
/// phase-1 dense simplex with Bland's rule.
bool linear_system_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& c);

}  // namespace uht::detail
