#pragma once

#include <Eigen/Dense>

namespace vvcsim {

/// Symmetric positive-definite weight for the voltage-error objective.
/// When built as the exact inverse of the VAr sensitivity (the factored form
/// M X^-1 M^T), `exact_inverse_of_A` lets gradient code cancel A*Phi products
/// algebraically instead of multiplying them out.
struct ObjectiveWeight {
    bool exact_inverse_of_A = false;
    Eigen::MatrixXd dense;  // Phi
    Eigen::MatrixXd E;      // upper triangular, E^T E = Phi
    double e_norm = 0.0;    // ||E||_2 = sqrt(lambda_max(Phi))

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return dense * v; }
};

enum class MetricProvenance { seed, optimized };

/// Diagonal per-bus step metric. Entries are positive; feasibility against
/// the sensitivity matrix (diag(d) - A PSD) is certified by verify_psd.
struct StepMetric {
    Eigen::VectorXd d;
    MetricProvenance provenance = MetricProvenance::seed;
};

}  // namespace vvcsim
