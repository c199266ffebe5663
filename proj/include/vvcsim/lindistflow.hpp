#pragma once

#include "vvcsim/network.hpp"
#include "vvcsim/weights.hpp"

#include <Eigen/Cholesky>

namespace vvcsim {

/// Linear sensitivity model of the feeder: V = A q^g + Rs p - A q^c + base.
/// A and Rs are dense SPD/symmetric matrices built from the incidence
/// decomposition by triangular solves; `llt` caches the Cholesky factor of A.
struct SensitivityModel {
    Eigen::MatrixXd A;          // VAr-to-voltage sensitivity, pu/pu
    Eigen::MatrixXd Rs;         // real-power sensitivity
    Eigen::VectorXd base_term;  // -V0 M^-T m0
    Eigen::LLT<Eigen::MatrixXd> llt;

    int size() const { return static_cast<int>(A.rows()); }
};

/// Uncontrolled operating point: net real injections and reactive load
/// consumption (consumption positive).
struct ExogenousState {
    Eigen::VectorXd p;
    Eigen::VectorXd q_c;
};

SensitivityModel build_sensitivity(const NetworkCase& net, const Topology& topo,
                                   const IncidenceDecomposition& inc);

/// Independent construction of A: entry (i, j) sums line reactances on the
/// common slack-path of buses i and j. Used as a cross-check oracle against
/// the incidence-based assembly.
Eigen::MatrixXd path_overlap_sensitivity(const NetworkCase& net, const Topology& topo);

/// Voltage component independent of DER VAr output.
Eigen::VectorXd v_par(const SensitivityModel& sens, const ExogenousState& d);

/// Linear-model bus voltages for DER output q_g under exogenous state d.
Eigen::VectorXd v_linear(const SensitivityModel& sens, const Eigen::VectorXd& q_g,
                         const ExogenousState& d);

/// 0.5 * ||V - v_ref||^2 weighted by phi, with V from the linear model.
double objective_f(const SensitivityModel& sens, const ObjectiveWeight& phi,
                   const Eigen::VectorXd& q_g, const ExogenousState& d,
                   const Eigen::VectorXd& v_ref);

/// Gradient A * phi * (V - v_ref); reduces to V - v_ref exactly when phi is
/// the exact inverse of A.
Eigen::VectorXd grad_f(const SensitivityModel& sens, const ObjectiveWeight& phi,
                       const Eigen::VectorXd& q_g, const ExogenousState& d,
                       const Eigen::VectorXd& v_ref);

/// Smallest eigenvalue of the SPD matrix A by inverse power iteration on the
/// cached Cholesky factor.
double min_eigenvalue_spd(const SensitivityModel& sens);

}  // namespace vvcsim
