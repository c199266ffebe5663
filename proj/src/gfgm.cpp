#include "vvcsim/gfgm.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace vvcsim {

Eigen::MatrixXd BoxQP::hessian() const {
    if (phi->exact_inverse_of_A) return sens->A;
    return sens->A * phi->dense * sens->A;
}

double gamma_next(double gamma) {
    return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * gamma * gamma));
}

Eigen::VectorXd p_L_step(const BoxQP& problem, const StepMetric& metric,
                         const Eigen::VectorXd& y) {
    const Eigen::VectorXd g = problem.grad(y);
    return problem.clamp(y - (g.array() / metric.d.array()).matrix());
}

Eigen::VectorXd extrapolate(const Eigen::VectorXd& q, const Eigen::VectorXd& q_prev, double gamma,
                            double gamma_nxt) {
    return q + ((gamma - 1.0) / gamma_nxt) * (q - q_prev);
}

GfgmTrajectory gfgm_solve(const BoxQP& problem, const StepMetric& metric,
                          const GfgmOptions& opts) {
    const int n = problem.size();
    if (metric.d.size() != n) input_error("step metric length mismatch");
    if ((metric.d.array() <= 0.0).any()) input_error("step metric must be positive");
    if (((problem.q_hi - problem.q_lo).array() < 0.0).any()) input_error("empty VAr box");

    GfgmTrajectory traj;
    traj.q0 = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd q_prev = traj.q0;
    Eigen::VectorXd y = traj.q0;
    double gamma = 1.0;

    for (int k = 1; k <= opts.max_iter; ++k) {
        const Eigen::VectorXd q = p_L_step(problem, metric, y);
        const double gamma_nxt = gamma_next(gamma);
        y = extrapolate(q, q_prev, gamma, gamma_nxt);

        traj.steps.push_back({k, q, y, gamma, problem.f(q)});
        const double dq = (q - q_prev).lpNorm<Eigen::Infinity>();
        q_prev = q;
        gamma = gamma_nxt;
        if (opts.tol > 0.0 && dq <= opts.tol) {
            traj.converged = true;
            break;
        }
    }
    return traj;
}

namespace {

double kkt_residual(const BoxQP& problem, const Eigen::VectorXd& q) {
    return (q - problem.clamp(q - problem.grad(q))).lpNorm<Eigen::Infinity>();
}

}  // namespace

OracleSolution centralized_oracle(const BoxQP& problem, const OracleOptions& opts) {
    const int n = problem.size();
    const Eigen::MatrixXd h = problem.hessian();
    const double lam_max = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h)
                               .eigenvalues()
                               .maxCoeff();
    if (!(lam_max > 0.0)) numerical_error("degenerate Hessian in oracle");
    const double step = 1.0 / lam_max;

    OracleSolution sol;
    sol.q = problem.clamp(Eigen::VectorXd::Zero(n));
    long it = 0;
    const long polish_every = 250;
    for (; it < opts.max_iter; ++it) {
        sol.q = problem.clamp(sol.q - step * problem.grad(sol.q));
        if (it % polish_every != polish_every - 1) continue;

        // Polish: exact solve for the free coordinates of the current
        // active-set guess, kept only if it improves the KKT residual.
        Eigen::VectorXd g = problem.grad(sol.q);
        std::vector<int> free_set;
        Eigen::VectorXd trial = sol.q;
        for (int i = 0; i < n; ++i) {
            const bool at_lo = sol.q(i) <= problem.q_lo(i) + 1e-12 && g(i) > 0.0;
            const bool at_hi = sol.q(i) >= problem.q_hi(i) - 1e-12 && g(i) < 0.0;
            if (at_lo)
                trial(i) = problem.q_lo(i);
            else if (at_hi)
                trial(i) = problem.q_hi(i);
            else
                free_set.push_back(i);
        }
        if (!free_set.empty()) {
            // Solve H_ff q_f = H_ff q_f - g_f at the trial point.
            const int nf = static_cast<int>(free_set.size());
            Eigen::MatrixXd hff(nf, nf);
            for (int a = 0; a < nf; ++a)
                for (int b = 0; b < nf; ++b) hff(a, b) = h(free_set[a], free_set[b]);
            const Eigen::VectorXd g_trial = problem.grad(trial);
            Eigen::VectorXd rhs(nf);
            for (int a = 0; a < nf; ++a) rhs(a) = g_trial(free_set[a]);
            const Eigen::LLT<Eigen::MatrixXd> llt(hff);
            if (llt.info() == Eigen::Success) {
                const Eigen::VectorXd delta = llt.solve(rhs);
                for (int a = 0; a < nf; ++a) trial(free_set[a]) -= delta(a);
                trial = problem.clamp(trial);
                if (kkt_residual(problem, trial) < kkt_residual(problem, sol.q)) sol.q = trial;
            }
        }
        if (kkt_residual(problem, sol.q) <= opts.kkt_tol) break;
    }
    sol.iterations = it + 1;
    sol.kkt_residual = kkt_residual(problem, sol.q);
    sol.f = problem.f(sol.q);
    if (sol.kkt_residual > std::max(opts.kkt_tol, 1e-10))
        numerical_error("oracle KKT residual " + std::to_string(sol.kkt_residual) +
                        " above tolerance after iteration budget");
    return sol;
}

namespace {

double norm_l(const Eigen::VectorXd& v, const StepMetric& metric) {
    return std::sqrt((metric.d.array() * v.array().square()).sum());
}

}  // namespace

BoundCheck check_rate_bound(const BoxQP& problem, const GfgmTrajectory& traj,
                            const OracleSolution& oracle, const StepMetric& metric) {
    BoundCheck check;
    const double r0 = norm_l(traj.q0 - oracle.q, metric);
    check.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& step : traj.steps) {
        const double lhs = step.f - oracle.f;
        const double rhs = 2.0 * r0 * r0 / double((step.k + 1) * (step.k + 1));
        check.lhs.push_back(lhs);
        check.rhs.push_back(rhs);
        check.worst_margin = std::min(check.worst_margin, rhs - lhs);
        if (lhs > rhs) check.all_hold = false;
    }
    return check;
}

BoundCheck check_distance_bound(const GfgmTrajectory& traj, const OracleSolution& oracle,
                                const StepMetric& metric, double sigma_min_h) {
    BoundCheck check;
    const double r0 = norm_l(traj.q0 - oracle.q, metric);
    check.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& step : traj.steps) {
        const double lhs = (step.q - oracle.q).norm();
        const double rhs = 2.0 * r0 / (double(step.k + 1) * std::sqrt(sigma_min_h));
        check.lhs.push_back(lhs);
        check.rhs.push_back(rhs);
        check.worst_margin = std::min(check.worst_margin, rhs - lhs);
        if (lhs > rhs) check.all_hold = false;
    }
    return check;
}

}  // namespace vvcsim
