#include "vvcsim/lindistflow.hpp"

namespace vvcsim {

namespace {

void check_dim(const SensitivityModel& sens, const Eigen::VectorXd& v, const char* name) {
    if (v.size() != sens.size())
        input_error(std::string(name) + " has wrong length " + std::to_string(v.size()) +
                    ", expected " + std::to_string(sens.size()));
}

// Solves M w = rhs for the reduced incidence matrix, walking buses in
// topological order. Each column of M has -1 on the diagonal and +1 at the
// parent row, so under the bus ordering the system is triangular up to the
// tree permutation: row j reads w(parent-line) - w(line j) = rhs(j).
Eigen::VectorXd solve_incidence(const Topology& topo, const Eigen::VectorXd& rhs) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(rhs.size());
    for (auto it = topo.order.rbegin(); it != topo.order.rend(); ++it) {
        const int j = *it;
        double acc = -rhs(j - 1);
        for (int child : topo.children[j]) acc += w(child - 1);
        w(j - 1) = acc;
    }
    return w;
}

// Solves M^T u = rhs: row for line j reads u(parent) - u(j) = rhs(j) with
// u(0) = 0 at the slack, resolved root-first.
Eigen::VectorXd solve_incidence_transposed(const Topology& topo, const Eigen::VectorXd& rhs) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(rhs.size());
    for (int j : topo.order) {
        const int parent = topo.parent[j - 1];
        const double up = parent == 0 ? 0.0 : u(parent - 1);
        u(j - 1) = up - rhs(j - 1);
    }
    return u;
}

}  // namespace

SensitivityModel build_sensitivity(const NetworkCase& net, const Topology& topo,
                                   const IncidenceDecomposition& inc) {
    const int n = net.bus_count;
    Eigen::VectorXd r(n), x(n);
    for (int j = 1; j <= n; ++j) {
        r(j - 1) = net.lines[j - 1].r;
        x(j - 1) = net.lines[j - 1].x;
    }

    // Column k of A is M^-T X M^-1 e_k, assembled with two triangular solves.
    SensitivityModel sens;
    sens.A.resize(n, n);
    sens.Rs.resize(n, n);
    for (int k = 0; k < n; ++k) {
        const Eigen::VectorXd w = solve_incidence(topo, Eigen::VectorXd::Unit(n, k));
        sens.A.col(k) = solve_incidence_transposed(topo, (x.array() * w.array()).matrix());
        sens.Rs.col(k) = solve_incidence_transposed(topo, (r.array() * w.array()).matrix());
    }
    // Symmetrize away the last bits of rounding; both forms are quadratic in
    // the same solves.
    sens.A = 0.5 * (sens.A + sens.A.transpose()).eval();
    sens.Rs = 0.5 * (sens.Rs + sens.Rs.transpose()).eval();
    sens.base_term = -net.slack_voltage * solve_incidence_transposed(topo, inc.m0);

    sens.llt.compute(sens.A);
    if (sens.llt.info() != Eigen::Success)
        numerical_error("sensitivity matrix is not positive definite");
    return sens;
}

Eigen::MatrixXd path_overlap_sensitivity(const NetworkCase& net, const Topology& topo) {
    const int n = net.bus_count;
    // Reactance of the path from the slack down to each bus.
    Eigen::VectorXd path_x = Eigen::VectorXd::Zero(n);
    std::vector<int> depth(n + 1, 0);
    for (int j : topo.order) {
        const int parent = topo.parent[j - 1];
        path_x(j - 1) = (parent == 0 ? 0.0 : path_x(parent - 1)) + net.lines[j - 1].x;
        depth[j] = depth[parent] + 1;
    }
    auto common_ancestor = [&](int a, int b) {
        while (a != b) {
            if (depth[a] >= depth[b])
                a = a == 0 ? 0 : topo.parent[a - 1];
            else
                b = topo.parent[b - 1];
        }
        return a;
    };
    Eigen::MatrixXd overlap(n, n);
    for (int i = 1; i <= n; ++i) {
        for (int j = i; j <= n; ++j) {
            const int anc = common_ancestor(i, j);
            const double v = anc == 0 ? 0.0 : path_x(anc - 1);
            overlap(i - 1, j - 1) = v;
            overlap(j - 1, i - 1) = v;
        }
    }
    return overlap;
}

Eigen::VectorXd v_par(const SensitivityModel& sens, const ExogenousState& d) {
    check_dim(sens, d.p, "p");
    check_dim(sens, d.q_c, "q_c");
    return sens.Rs * d.p - sens.A * d.q_c + sens.base_term;
}

Eigen::VectorXd v_linear(const SensitivityModel& sens, const Eigen::VectorXd& q_g,
                         const ExogenousState& d) {
    check_dim(sens, q_g, "q_g");
    return sens.A * q_g + v_par(sens, d);
}

double objective_f(const SensitivityModel& sens, const ObjectiveWeight& phi,
                   const Eigen::VectorXd& q_g, const ExogenousState& d,
                   const Eigen::VectorXd& v_ref) {
    const Eigen::VectorXd r = v_linear(sens, q_g, d) - v_ref;
    return 0.5 * r.dot(phi.apply(r));
}

Eigen::VectorXd grad_f(const SensitivityModel& sens, const ObjectiveWeight& phi,
                       const Eigen::VectorXd& q_g, const ExogenousState& d,
                       const Eigen::VectorXd& v_ref) {
    const Eigen::VectorXd r = v_linear(sens, q_g, d) - v_ref;
    if (phi.exact_inverse_of_A) return r;
    return sens.A * phi.apply(r);
}

double min_eigenvalue_spd(const SensitivityModel& sens) {
    const int n = sens.size();
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
    double rayleigh = v.dot(sens.A * v);
    for (int it = 0; it < 1000; ++it) {
        Eigen::VectorXd y = sens.llt.solve(v);
        y.normalize();
        const double next = y.dot(sens.A * y);
        const bool settled = std::abs(next - rayleigh) <= 1e-14 * std::abs(next);
        rayleigh = next;
        v = y;
        if (settled && it > 2) break;
    }
    return rayleigh;
}

}  // namespace vvcsim
