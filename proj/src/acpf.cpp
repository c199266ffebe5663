#include "vvcsim/acpf.hpp"

#include "vvcsim/gfgm.hpp"

#include <cmath>

namespace vvcsim {

PFSolution solve_branch_flow(const NetworkCase& net, const Topology& topo,
                             const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                             const PFOptions& opts) {
    const int n = net.bus_count;
    if (p.size() != n || q.size() != n) input_error("injection vector length mismatch");
    if (!(opts.tol > 0.0)) input_error("power flow tolerance must be positive");

    const double v0 = net.slack_voltage;
    Eigen::VectorXd v2 = Eigen::VectorXd::Constant(n, v0 * v0);
    Eigen::VectorXd pf = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd qf = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd loss = Eigen::VectorXd::Zero(n);  // (P^2+Q^2)/V_send^2 per line

    PFSolution sol;
    for (int it = 1; it <= opts.max_iter; ++it) {
        // Backward: aggregate line flows leaf-first with lagged loss terms.
        for (auto bus = topo.order.rbegin(); bus != topo.order.rend(); ++bus) {
            const int j = *bus;
            const int e = j - 1;
            double acc_p = -p(j - 1) + net.lines[e].r * loss(e);
            double acc_q = -q(j - 1) + net.lines[e].x * loss(e);
            for (int child : topo.children[j]) {
                acc_p += pf(child - 1);
                acc_q += qf(child - 1);
            }
            pf(e) = acc_p;
            qf(e) = acc_q;
        }
        // Forward: propagate squared voltages root-first, refreshing losses.
        double dv_max = 0.0;
        for (int j : topo.order) {
            const int e = j - 1;
            const int parent = topo.parent[e];
            const double vi2 = parent == 0 ? v0 * v0 : v2(parent - 1);
            const double r = net.lines[e].r;
            const double x = net.lines[e].x;
            loss(e) = (pf(e) * pf(e) + qf(e) * qf(e)) / vi2;
            const double vj2 = vi2 - 2.0 * (r * pf(e) + x * qf(e)) + (r * r + x * x) * loss(e);
            if (!std::isfinite(vj2) || vj2 < opts.v2_floor)
                numerical_error("voltage collapse at bus " + std::to_string(j));
            dv_max = std::max(dv_max, std::abs(std::sqrt(vj2) - std::sqrt(v2(e))));
            v2(e) = vj2;
        }
        if (dv_max <= opts.tol) {
            sol.iterations = it;
            break;
        }
        if (it == opts.max_iter)
            numerical_error("power flow did not converge within " + std::to_string(opts.max_iter) +
                            " sweeps");
    }

    sol.v = v2.cwiseSqrt();
    sol.p_flow = pf;
    sol.q_flow = qf;
    sol.residual = branch_flow_residual(net, topo, p, q, sol);
    return sol;
}

double branch_flow_residual(const NetworkCase& net, const Topology& topo,
                            const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                            const PFSolution& sol) {
    const int n = net.bus_count;
    const double v0 = net.slack_voltage;
    double worst = 0.0;
    for (int j = 1; j <= n; ++j) {
        const int e = j - 1;
        const int parent = topo.parent[e];
        const double vi2 = parent == 0 ? v0 * v0 : sol.v(parent - 1) * sol.v(parent - 1);
        const double vj2 = sol.v(e) * sol.v(e);
        const double r = net.lines[e].r;
        const double x = net.lines[e].x;
        const double ell = (sol.p_flow(e) * sol.p_flow(e) + sol.q_flow(e) * sol.q_flow(e)) / vi2;
        double child_p = 0.0, child_q = 0.0;
        for (int child : topo.children[j]) {
            child_p += sol.p_flow(child - 1);
            child_q += sol.q_flow(child - 1);
        }
        worst = std::max(worst, std::abs(sol.p_flow(e) - child_p - (-p(j - 1) + r * ell)));
        worst = std::max(worst, std::abs(sol.q_flow(e) - child_q - (-q(j - 1) + x * ell)));
        worst = std::max(worst,
                         std::abs(vi2 - vj2 - 2.0 * (r * sol.p_flow(e) + x * sol.q_flow(e)) +
                                  (r * r + x * x) * ell));
    }
    return worst;
}

double objective_m(const NetworkCase& net, const Topology& topo, const ObjectiveWeight& phi,
                   const Eigen::VectorXd& q_g, const ExogenousState& d,
                   const Eigen::VectorXd& v_ref, const PFOptions& opts) {
    const PFSolution sol = solve_branch_flow(net, topo, d.p, q_g - d.q_c, opts);
    const Eigen::VectorXd r = sol.v - v_ref;
    return 0.5 * r.dot(phi.apply(r));
}

namespace {

// Portable uniform in [0, 1); avoids distribution implementation differences.
double uniform01(std::uint64_t& state) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return double(state >> 11) * 0x1p-53;
}

}  // namespace

GapReport measure_gap(const NetworkCase& net, const Topology& topo, const SensitivityModel& sens,
                      const ObjectiveWeight& phi, const ExogenousState& d,
                      const Eigen::VectorXd& q_lo, const Eigen::VectorXd& q_hi,
                      const Eigen::VectorXd& v_ref, const GapOptions& opts) {
    const int n = net.bus_count;
    if (n > 3) input_error("gap grid search is limited to networks with at most 3 buses");
    if (opts.samples < 1) input_error("gap sampling needs at least one sample");
    if (((q_hi - q_lo).array() < 0.0).any()) input_error("empty VAr box");

    PlantFn plant = opts.plant;
    if (!plant) {
        plant = [&](const Eigen::VectorXd& q_g, const ExogenousState& dd) {
            return solve_branch_flow(net, topo, dd.p, q_g - dd.q_c).v;
        };
    }

    GapReport report;
    report.e_norm = phi.e_norm;

    auto gap_at = [&](const Eigen::VectorXd& q_g) {
        return (plant(q_g, d) - v_linear(sens, q_g, d)).norm();
    };

    // Corners plus seeded interior points; this samples (so lower-bounds) the
    // true maximum gap over the box.
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        Eigen::VectorXd q(n);
        for (int i = 0; i < n; ++i) q(i) = (mask >> i) & 1u ? q_hi(i) : q_lo(i);
        report.delta = std::max(report.delta, gap_at(q));
    }
    std::uint64_t rng = opts.seed * 2862933555777941757ULL + 3037000493ULL;
    for (int s = 0; s < opts.samples; ++s) {
        Eigen::VectorXd q(n);
        for (int i = 0; i < n; ++i) q(i) = q_lo(i) + uniform01(rng) * (q_hi(i) - q_lo(i));
        report.delta = std::max(report.delta, gap_at(q));
    }

    // tau: exhaustive grid minimum of the exact-model objective vs the
    // linear-model optimum from the centralized oracle.
    double m_best = std::numeric_limits<double>::infinity();
    const int g = std::max(2, opts.grid_per_axis);
    std::vector<int> idx(n, 0);
    Eigen::VectorXd q(n);
    while (true) {
        for (int i = 0; i < n; ++i)
            q(i) = q_lo(i) + (q_hi(i) - q_lo(i)) * double(idx[i]) / double(g - 1);
        const Eigen::VectorXd r = plant(q, d) - v_ref;
        m_best = std::min(m_best, 0.5 * r.dot(phi.apply(r)));
        int axis = 0;
        while (axis < n && ++idx[axis] == g) idx[axis++] = 0;
        if (axis == n) break;
    }

    const BoxQP problem(sens, phi, d, v_ref, q_lo, q_hi);
    const OracleSolution oracle = centralized_oracle(problem);
    report.tau = std::abs(m_best - oracle.f);
    report.const_bound = 0.5 * report.e_norm * report.e_norm * report.delta * report.delta +
                         report.tau;
    return report;
}

}  // namespace vvcsim
