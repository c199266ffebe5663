#include "vvcsim/network.hpp"

#include <algorithm>
#include <queue>

namespace vvcsim {

int NetworkCase::lookup(std::int64_t label) const {
    if (label == slack_label) return 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return static_cast<int>(i) + 1;
    return -1;
}

void validate_case(const NetworkCase& net) {
    const int n = net.bus_count;
    if (n < 1) input_error("case has no non-slack buses");
    if (static_cast<int>(net.lines.size()) != n)
        input_error("not radial: expected " + std::to_string(n) + " lines, got " +
                    std::to_string(net.lines.size()));
    if (net.p_load.size() != n || net.q_load.size() != n || static_cast<int>(net.ders.size()) != n)
        input_error("per-bus arrays do not match bus count");
    if (!(net.slack_voltage > 0.0)) input_error("slack voltage must be positive");

    std::vector<int> indegree(n + 1, 0);
    for (const auto& line : net.lines) {
        if (line.from < 0 || line.from > n || line.to < 1 || line.to > n)
            input_error("line endpoint out of range");
        if (line.from == line.to) input_error("self-loop on bus " + std::to_string(line.to));
        if (!(line.x > 0.0))
            input_error("nonpositive reactance on line into bus " + std::to_string(line.to));
        if (line.r < 0.0)
            input_error("negative resistance on line into bus " + std::to_string(line.to));
        indegree[line.to] += 1;
    }
    for (int j = 1; j <= n; ++j) {
        if (indegree[j] > 1)
            input_error("not radial: bus " + std::to_string(j) + " has multiple predecessors");
        if (indegree[j] == 0)
            input_error("not radial: bus " + std::to_string(j) + " has no predecessor");
    }
    for (const auto& der : net.ders) {
        if (der.mode == DerMode::fixed_band && der.q_min > der.q_max)
            input_error("DER q_min exceeds q_max");
        if (der.capacity < 0.0) input_error("negative DER capacity");
    }
}

Topology build_topology(const NetworkCase& net) {
    validate_case(net);
    const int n = net.bus_count;

    Topology topo;
    topo.parent.assign(n, -1);
    topo.children.assign(n + 1, {});
    topo.descendants.assign(n, {});
    for (const auto& line : net.lines) {
        topo.parent[line.to - 1] = line.from;
        topo.children[line.from].push_back(line.to);
    }
    for (auto& kids : topo.children) std::sort(kids.begin(), kids.end());

    // BFS from the slack; every bus must be reached exactly once.
    topo.order.reserve(n);
    std::queue<int> frontier;
    frontier.push(0);
    std::vector<bool> seen(n + 1, false);
    seen[0] = true;
    while (!frontier.empty()) {
        const int bus = frontier.front();
        frontier.pop();
        if (bus != 0) topo.order.push_back(bus);
        for (int child : topo.children[bus]) {
            if (seen[child]) input_error("cycle detected at bus " + std::to_string(child));
            seen[child] = true;
            frontier.push(child);
        }
    }
    if (static_cast<int>(topo.order.size()) != n) {
        for (int j = 1; j <= n; ++j)
            if (!seen[j]) input_error("bus " + std::to_string(j) + " unreachable from slack");
    }

    // Accumulate strict descendant sets leaf-first.
    for (auto it = topo.order.rbegin(); it != topo.order.rend(); ++it) {
        const int bus = *it;
        auto& desc = topo.descendants[bus - 1];
        for (int child : topo.children[bus]) {
            desc.push_back(child);
            const auto& sub = topo.descendants[child - 1];
            desc.insert(desc.end(), sub.begin(), sub.end());
        }
        std::sort(desc.begin(), desc.end());
    }
    return topo;
}

IncidenceDecomposition incidence(const NetworkCase& net, const Topology& topo) {
    const int n = net.bus_count;
    IncidenceDecomposition inc;
    inc.m0 = Eigen::VectorXd::Zero(n);
    inc.M = Eigen::MatrixXd::Zero(n, n);
    for (int j = 1; j <= n; ++j) {
        const int col = j - 1;
        const int parent = topo.parent[j - 1];
        inc.M(j - 1, col) = -1.0;
        if (parent == 0)
            inc.m0(col) = 1.0;
        else
            inc.M(parent - 1, col) = 1.0;
    }
    return inc;
}

}  // namespace vvcsim
