#pragma once

#include <Eigen/Dense>

namespace vvcsim::detail {

/// Solves the covering LP  min 1^T u  s.t.  C u >= b, u >= 0  with C >= 0
/// elementwise and b > 0, through the simplex method on its packing dual
/// (which starts feasible at y = 0). Returns the optimal u.
Eigen::VectorXd solve_covering_lp(const Eigen::MatrixXd& c, const Eigen::VectorXd& b);

}  // namespace vvcsim::detail
