#pragma once

#include "vvcsim/lindistflow.hpp"
#include "vvcsim/weights.hpp"

#include <vector>

namespace vvcsim {

/// Box-constrained convex quadratic over DER VAr outputs. Holds references to
/// the feeder model; callers keep those alive for the problem's lifetime.
/// `c` caches the VAr-independent voltage term; call refresh() after editing
/// the exogenous state.
struct BoxQP {
    const SensitivityModel* sens = nullptr;
    const ObjectiveWeight* phi = nullptr;
    ExogenousState d;
    Eigen::VectorXd v_ref;
    Eigen::VectorXd q_lo;
    Eigen::VectorXd q_hi;
    Eigen::VectorXd c;

    BoxQP() = default;
    BoxQP(const SensitivityModel& s, const ObjectiveWeight& w, ExogenousState exo,
          Eigen::VectorXd ref, Eigen::VectorXd lo, Eigen::VectorXd hi)
        : sens(&s), phi(&w), d(std::move(exo)), v_ref(std::move(ref)), q_lo(std::move(lo)),
          q_hi(std::move(hi)) {
        refresh();
    }

    void refresh() { c = v_par(*sens, d); }
    int size() const { return sens->size(); }
    double f(const Eigen::VectorXd& q) const {
        const Eigen::VectorXd r = sens->A * q + c - v_ref;
        return 0.5 * r.dot(phi->apply(r));
    }
    Eigen::VectorXd grad(const Eigen::VectorXd& q) const {
        const Eigen::VectorXd r = sens->A * q + c - v_ref;
        if (phi->exact_inverse_of_A) return r;
        return sens->A * phi->apply(r);
    }
    Eigen::MatrixXd hessian() const;  // A Phi A
    Eigen::VectorXd clamp(const Eigen::VectorXd& q) const {
        return q.cwiseMax(q_lo).cwiseMin(q_hi);
    }
};

struct GfgmStep {
    int k = 0;
    Eigen::VectorXd q;
    Eigen::VectorXd y;
    double gamma = 1.0;  // gamma(k) in effect when q(k) was produced
    double f = 0.0;
};

struct GfgmTrajectory {
    Eigen::VectorXd q0;
    std::vector<GfgmStep> steps;  // steps[k-1] holds iterate k
    bool converged = false;
};

/// Momentum counter recurrence; strictly increasing from gamma(1) = 1.
double gamma_next(double gamma);

/// Closed-form minimizer of the separable approximation model: the  metric-
/// scaled gradient step from y, clamped to the box.
Eigen::VectorXd p_L_step(const BoxQP& problem, const StepMetric& metric, const Eigen::VectorXd& y);

/// y = q + [(gamma - 1)/gamma_nxt] (q - q_prev).
Eigen::VectorXd extrapolate(const Eigen::VectorXd& q, const Eigen::VectorXd& q_prev, double gamma,
                            double gamma_nxt);

struct GfgmOptions {
    double tol = 1e-6;    // on the inf-norm step change; <= 0 disables early stop
    int max_iter = 10000;
};

/// Fast gradient iteration from q(0) = y(1) = 0; records the full trajectory.
GfgmTrajectory gfgm_solve(const BoxQP& problem, const StepMetric& metric,
                          const GfgmOptions& opts = {});

struct OracleOptions {
    double kkt_tol = 1e-12;
    long max_iter = 1000000;
};

struct OracleSolution {
    Eigen::VectorXd q;
    double f = 0.0;
    double kkt_residual = 0.0;
    long iterations = 0;
};

/// High-accuracy reference solution: projected gradient with a fixed
/// 1/lambda_max step, polished by an exact solve on the identified active
/// set, then KKT-verified. Throws a numerical Error if the requested
/// residual is not reached.
OracleSolution centralized_oracle(const BoxQP& problem, const OracleOptions& opts = {});

struct BoundCheck {
    std::vector<double> lhs;
    std::vector<double> rhs;
    bool all_hold = true;
    double worst_margin = 0.0;  // min over k of rhs - lhs
};

/// Objective-gap rate bound 2 ||q0 - q*||_L^2 / (k+1)^2 at every recorded k.
BoundCheck check_rate_bound(const BoxQP& problem, const GfgmTrajectory& traj,
                            const OracleSolution& oracle, const StepMetric& metric);

/// Iterate-distance bound 2 ||q0 - q*||_L / ((k+1) sqrt(sigma_min_h)).
BoundCheck check_distance_bound(const GfgmTrajectory& traj, const OracleSolution& oracle,
                                const StepMetric& metric, double sigma_min_h);

}  // namespace vvcsim
