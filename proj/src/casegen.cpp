#include "vvcsim/casegen.hpp"

#include "rng.hpp"

#include <cmath>

namespace vvcsim {

namespace {

double snap(double value, double grid) { return std::round(value / grid) * grid; }

}  // namespace

NetworkCase make_case(const CaseGenOptions& opts, std::uint64_t seed) {
    const int n = opts.bus_count;
    if (n < 1) input_error("bus count must be positive");
    const int trunk = std::min(std::max(opts.trunk_length, 1), n);
    const double z_base = 1000.0 * opts.base_kv * opts.base_kv / opts.base_kva;

    NetworkCase net;
    net.bus_count = n;
    net.slack_voltage = opts.slack_voltage;
    net.base_kv = opts.base_kv;
    net.base_kva = opts.base_kva;
    net.slack_label = 0;
    net.labels.resize(n);
    for (int j = 0; j < n; ++j) net.labels[j] = j + 1;

    std::uint64_t rng = detail::rng_seed(seed);
    std::vector<int> trunk_buses;
    net.lines.reserve(n);

    auto add_line = [&](int from, int to, bool on_trunk) {
        const double jitter = 1.0 + opts.impedance_jitter * (2.0 * detail::uniform01(rng) - 1.0);
        const double x_ohm = (on_trunk ? opts.trunk_x_ohm : opts.lateral_x_ohm) * jitter;
        const double r_ohm = x_ohm * (on_trunk ? opts.trunk_r_over_x : opts.lateral_r_over_x);
        net.lines.push_back({from, to, r_ohm / z_base, x_ohm / z_base});
    };

    // Trunk chain off the slack, then laterals rooted at random trunk buses.
    int next = 1;
    for (; next <= trunk; ++next) {
        add_line(next - 1, next, true);
        trunk_buses.push_back(next);
    }
    while (next <= n) {
        int at = trunk_buses[static_cast<std::size_t>(
            detail::uniform_int(rng, 0, static_cast<int>(trunk_buses.size()) - 1))];
        const int len = detail::uniform_int(rng, 1, opts.max_lateral_length);
        for (int hop = 0; hop < len && next <= n; ++hop, ++next) {
            add_line(at, next, false);
            at = next;
        }
    }

    net.p_load = Eigen::VectorXd::Constant(n, -opts.load_kw / opts.base_kva);
    net.q_load = Eigen::VectorXd::Constant(n, -opts.load_kvar / opts.base_kva);
    net.ders.assign(n, {});
    for (int i = 0; i < n; ++i) {
        if (detail::uniform01(rng) >= opts.der_density) continue;
        DerSpec der;
        der.mode = opts.der_mode;
        if (opts.der_mode == DerMode::fixed_band) {
            der.q_max = opts.der_band_kvar / opts.base_kva;
            der.q_min = -der.q_max;
        } else if (opts.der_mode == DerMode::capacity) {
            der.capacity = opts.der_capacity_kva / opts.base_kva;
        }
        net.ders[i] = der;
    }

    validate_case(net);
    return net;
}

NetworkCase random_radial_case(int bus_count, std::uint64_t seed) {
    if (bus_count < 1) input_error("bus count must be positive");
    NetworkCase net;
    net.bus_count = bus_count;
    net.slack_voltage = 1.0;
    net.base_kv = 4.16;
    net.base_kva = 100.0;
    net.slack_label = 0;
    net.labels.resize(bus_count);
    for (int j = 0; j < bus_count; ++j) net.labels[j] = j + 1;

    std::uint64_t rng = detail::rng_seed(seed ^ 0xabcd1234u);
    net.lines.reserve(bus_count);
    for (int j = 1; j <= bus_count; ++j) {
        const int parent = detail::uniform_int(rng, 0, j - 1);
        const double x = detail::uniform(rng, 5e-4, 5e-3);
        const double r = x * detail::uniform(rng, 0.3, 1.5);
        net.lines.push_back({parent, j, r, x});
    }

    net.p_load.resize(bus_count);
    net.q_load.resize(bus_count);
    net.ders.assign(bus_count, {});
    for (int i = 0; i < bus_count; ++i) {
        // Snapped to a fine grid so serialized copies reload bit-exactly.
        net.p_load(i) = -snap(detail::uniform(rng, 0.002, 0.02), 1e-6);
        net.q_load(i) = -snap(detail::uniform(rng, 0.001, 0.01), 1e-6);
        if (detail::uniform01(rng) < 0.1) continue;  // occasional bus without a DER
        DerSpec der;
        der.mode = DerMode::fixed_band;
        der.q_max = snap(detail::uniform(rng, 0.02, 0.2), 1e-3);
        der.q_min = -der.q_max;
        net.ders[i] = der;
    }

    validate_case(net);
    return net;
}

NetworkCase strip_ders(NetworkCase net) {
    for (auto& der : net.ders) der = DerSpec{};
    return net;
}

}  // namespace vvcsim
