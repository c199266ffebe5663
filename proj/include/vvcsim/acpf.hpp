#pragma once

#include "vvcsim/lindistflow.hpp"
#include "vvcsim/network.hpp"

#include <cstdint>
#include <functional>

namespace vvcsim {

/// Converged branch-flow state. Flows are sending-end values ordered like
/// the lines (entry j-1 belongs to the line into bus j).
struct PFSolution {
    Eigen::VectorXd v;       // bus voltage magnitudes, pu, length N
    Eigen::VectorXd p_flow;  // pu
    Eigen::VectorXd q_flow;  // pu
    int iterations = 0;
    double residual = 0.0;   // max branch-flow equation residual
};

struct PFOptions {
    double tol = 1e-10;      // max voltage change between sweeps
    int max_iter = 200;
    double v2_floor = 0.25;  // pu^2; below this the solve is declared collapsed
};

/// Backward/forward sweep for the exact branch-flow equations on a radial
/// feeder. `p`, `q` are net bus injections (generation positive). Throws a
/// numerical Error on divergence or voltage collapse.
PFSolution solve_branch_flow(const NetworkCase& net, const Topology& topo,
                             const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                             const PFOptions& opts = {});

/// Max residual of the branch-flow equations at a candidate solution;
/// independent of the sweep that produced it.
double branch_flow_residual(const NetworkCase& net, const Topology& topo,
                            const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                            const PFSolution& sol);

/// Exact-model objective 0.5 * ||h(q_g, d) - v_ref||^2_phi.
double objective_m(const NetworkCase& net, const Topology& topo, const ObjectiveWeight& phi,
                   const Eigen::VectorXd& q_g, const ExogenousState& d,
                   const Eigen::VectorXd& v_ref, const PFOptions& opts = {});

/// Measured bounds for the model-gap inequality: delta is the sampled max
/// gap between the exact and linear voltage maps over the VAr box (a lower
/// bound on the true maximum), tau the grid-estimated difference between the
/// exact and linear optimal values.
struct GapReport {
    double delta = 0.0;
    double tau = 0.0;
    double e_norm = 0.0;      // ||E||_2 with E^T E = phi
    double const_bound = 0.0; // 0.5 ||E||^2 delta^2 + tau
};

using PlantFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&, const ExogenousState&)>;

struct GapOptions {
    int samples = 64;             // random interior points in addition to box corners
    int grid_per_axis = 120;      // tau grid resolution
    std::uint64_t seed = 1;
    PlantFn plant;                // defaults to solve_branch_flow
};

/// Only supported for N <= 3 (the tau grid search is exhaustive).
GapReport measure_gap(const NetworkCase& net, const Topology& topo, const SensitivityModel& sens,
                      const ObjectiveWeight& phi, const ExogenousState& d,
                      const Eigen::VectorXd& q_lo, const Eigen::VectorXd& q_hi,
                      const Eigen::VectorXd& v_ref, const GapOptions& opts = {});

}  // namespace vvcsim
