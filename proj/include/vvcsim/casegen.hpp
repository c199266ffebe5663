#pragma once

#include "vvcsim/network.hpp"

#include <cstdint>

namespace vvcsim {

/// Knobs for the synthetic feeder generator: a low-impedance trunk with
/// higher-impedance laterals hanging off it, uniform nominal loads, and DERs
/// on a seeded subset of buses.
struct CaseGenOptions {
    int bus_count = 123;
    double base_kv = 4.16;
    double base_kva = 100.0;
    double slack_voltage = 1.0;
    double load_kw = 1.0;    // consumption magnitude per bus
    double load_kvar = 0.5;
    DerMode der_mode = DerMode::fixed_band;
    double der_band_kvar = 10.0;      // fixed_band: +/- limit
    double der_capacity_kva = 50.0;   // capacity mode rating
    double der_density = 1.0;         // fraction of buses carrying a DER
    int trunk_length = 8;
    int max_lateral_length = 3;
    double trunk_x_ohm = 0.055;       // per-span reactance scale
    double lateral_x_ohm = 0.30;
    double trunk_r_over_x = 0.6;
    double lateral_r_over_x = 2.0;
    double impedance_jitter = 0.25;   // relative spread around the span scales
};

NetworkCase make_case(const CaseGenOptions& opts, std::uint64_t seed);

/// Small random radial case for property batteries: random recursive tree,
/// jittered impedances and loads, fixed-band DERs with occasional
/// zero-capacity buses.
NetworkCase random_radial_case(int bus_count, std::uint64_t seed);

/// Copy of the case with every DER removed (no-control runs).
NetworkCase strip_ders(NetworkCase net);

}  // namespace vvcsim
