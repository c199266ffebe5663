#pragma once

#include "vvcsim/lindistflow.hpp"
#include "vvcsim/network.hpp"
#include "vvcsim/weights.hpp"

namespace vvcsim {

/// Exact inverse of the VAr sensitivity via the product form M X^-1 M^T,
/// with its Cholesky factor E (E^T E = Phi) and spectral norm.
ObjectiveWeight phi_from_A(const NetworkCase& net, const IncidenceDecomposition& inc);

/// Wraps an explicit SPD matrix as an objective weight (tests, gap studies).
ObjectiveWeight weight_from_matrix(Eigen::MatrixXd phi);

/// Row-absolute-sum metric; diagonally dominant against A, hence feasible.
StepMetric diag_dominant_seed(const Eigen::MatrixXd& a);

struct TraceMinOptions {
    double tol_rel = 1e-8;      // eigenvalue tolerance relative to ||A||_2
    int max_cuts_per_bus = 10;  // cut budget = max_cuts_per_bus * N
};

/// Trace-minimal diagonal metric subject to diag(L) - A PSD, by eigenvector
/// cutting planes over a linear program. The result is scaled to exact
/// feasibility, certified, and never worse in trace than the seed.
StepMetric solve_trace_min_metric(const Eigen::MatrixXd& a, const TraceMinOptions& opts = {});

struct PsdReport {
    bool psd = false;
    double min_eig = 0.0;  // smallest eigenvalue of diag(L) - A
    double eps = 0.0;      // shift used by the Cholesky gate, 1e-9 ||A||_2
};

PsdReport verify_psd(const StepMetric& metric, const Eigen::MatrixXd& a);

/// Smallest eigenpair of a symmetric matrix by Gershgorin-shifted inverse
/// power iteration.
std::pair<double, Eigen::VectorXd> smallest_eigenpair_sym(const Eigen::MatrixXd& s);

}  // namespace vvcsim
