#include "simplex.hpp"

#include "vvcsim/network.hpp"

#include <limits>
#include <vector>

namespace vvcsim::detail {

// Dual of the covering problem: max b^T y s.t. C^T y <= 1, y >= 0, solved on
// a dense tableau with slack starting basis. The optimal primal u is read off
// the slack columns' reduced costs.
Eigen::VectorXd solve_covering_lp(const Eigen::MatrixXd& c, const Eigen::VectorXd& b) {
    const int m = static_cast<int>(c.rows());  // covering rows = dual variables
    const int n = static_cast<int>(c.cols());  // u dimension = dual constraints
    if (m == 0) return Eigen::VectorXd::Zero(n);

    // Tableau rows: n constraints; columns: m dual vars, n slacks, rhs.
    Eigen::MatrixXd tab(n + 1, m + n + 1);
    tab.setZero();
    tab.block(0, 0, n, m) = c.transpose();
    tab.block(0, m, n, n).setIdentity();
    tab.block(0, m + n, n, 1).setOnes();
    tab.block(n, 0, 1, m) = -b.transpose();  // objective row: maximize b^T y

    std::vector<int> basis(n);
    for (int i = 0; i < n; ++i) basis[i] = m + i;

    const int bland_after = 3 * (m + n);
    const int hard_cap = 60 * (m + n) + 200;
    for (int iter = 0; iter < hard_cap; ++iter) {
        // Entering column: most negative reduced cost, Bland's rule once the
        // iteration count suggests cycling.
        int enter = -1;
        if (iter < bland_after) {
            double best = -1e-11;
            for (int j = 0; j < m + n; ++j)
                if (tab(n, j) < best) {
                    best = tab(n, j);
                    enter = j;
                }
        } else {
            for (int j = 0; j < m + n; ++j)
                if (tab(n, j) < -1e-11) {
                    enter = j;
                    break;
                }
        }
        if (enter < 0) break;  // optimal

        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            const double a = tab(i, enter);
            if (a <= 1e-12) continue;
            const double ratio = tab(i, m + n) / a;
            if (ratio < best_ratio - 1e-15 ||
                (ratio < best_ratio + 1e-15 && (leave < 0 || basis[i] < basis[leave]))) {
                best_ratio = ratio;
                leave = i;
            }
        }
        if (leave < 0) numerical_error("covering LP: dual unbounded (infeasible primal)");

        const double pivot = tab(leave, enter);
        tab.row(leave) /= pivot;
        for (int i = 0; i <= n; ++i) {
            if (i == leave) continue;
            const double factor = tab(i, enter);
            if (factor != 0.0) tab.row(i) -= factor * tab.row(leave);
        }
        basis[leave] = enter;
    }

    // Primal solution: reduced costs of the slack columns.
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) u(i) = std::max(0.0, tab(n, m + i));

    // Feasibility repair for rounding: lift u uniformly if a covering row is
    // slightly short (exact feasibility is re-established by the caller's
    // eigenvalue-based post-pass anyway).
    for (int j = 0; j < m; ++j) {
        const double need = b(j) - c.row(j).dot(u);
        if (need > 0.0) {
            const double weight = c.row(j).sum();
            if (weight > 0.0) u.array() += need / weight;
        }
    }
    return u;
}

}  // namespace vvcsim::detail
