#pragma once

#include "vvcsim/acpf.hpp"
#include "vvcsim/controllers.hpp"
#include "vvcsim/gfgm.hpp"
#include "vvcsim/lindistflow.hpp"
#include "vvcsim/network.hpp"
#include "vvcsim/synthesis.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vvcsim {

/// Everything derived from a case that closed-loop runs need: topology,
/// incidence, sensitivity, the inverse-sensitivity weight and the synthesized
/// diagonal step metric.
struct FeederModel {
    NetworkCase net;
    Topology topo;
    IncidenceDecomposition inc;
    SensitivityModel sens;
    ObjectiveWeight phi;
    StepMetric metric;
};

FeederModel build_feeder(NetworkCase net, const TraceMinOptions& metric_opts = {});

/// Exogenous state at the case's nominal loads (no PV real output).
ExogenousState nominal_state(const NetworkCase& net);

/// Standard experiment settings per controller: unit slopes for cdc/ddc/gpdc,
/// ddc alpha 0.1, sgpdc slope 0.01 with inverse-Hessian-diagonal scaling, and
/// the feeder's synthesized metric for asalvc.
ControllerConfig default_config(ControllerKind kind, const FeederModel& feeder);

enum class PlantKind { linear, nonlinear };

enum class ScenarioKind { constant, sudden_change, continuous };

struct ScenarioParams {
    ScenarioKind kind = ScenarioKind::constant;
    int steps = 60;
    double dt = 1.0;  // seconds
    // sudden_change
    int change_step = 10;
    double multiplier = 1.5;
    // continuous
    double load_swing = 0.35;       // day/night amplitude around nominal
    double load_sigma = 0.04;       // per-step per-bus multiplicative noise
    double pv_peak_fraction = 0.6;  // midday PV output as a fraction of rating
    double pv_sigma = 0.08;
};

/// Per-step absolute injection series, one column per non-slack bus.
struct ScenarioTimeline {
    double dt = 1.0;
    Eigen::MatrixXd p_load;  // steps x N, pu injections (loads negative)
    Eigen::MatrixXd q_load;  // steps x N
    Eigen::MatrixXd p_pv;    // steps x N, nonnegative DER real output
};

ScenarioTimeline make_scenario(const NetworkCase& net, const ScenarioParams& params,
                               std::uint64_t seed);

struct StepRecord {
    double time_s = 0.0;
    double objective = 0.0;  // 0.5 ||V - v_ref||^2_phi with the plant's V
    double mismatch = 0.0;   // ||V - v_ref||_2
    double v_min = 0.0;
    double v_max = 0.0;
    double dq_inf = 0.0;
    int saturated = 0;
    bool v_violation = false;
    bool cap_violation = false;
};

struct SimulationTrace {
    std::vector<StepRecord> steps;
    Eigen::MatrixXd v_series;  // steps x N when store_series, else empty
    Eigen::MatrixXd q_series;
    Eigen::VectorXd v_final;
    Eigen::VectorXd q_final;
    bool converged = false;  // offline runs
    int iterations = 0;
    bool aborted = false;  // online plant divergence
    std::string abort_reason;
};

struct SimOptions {
    PlantKind plant = PlantKind::nonlinear;
    double tol = 1e-6;   // offline stop on ||dq||_inf
    int max_iter = 200;  // offline iteration budget
    bool store_series = true;
    double band_lo = 0.95;
    double band_hi = 1.05;
    double noise_std = 0.0;  // additive Gaussian measurement noise, pu
    std::uint64_t noise_seed = 1;
};

/// Fixed-condition closed loop: measure, step every bus controller, solve the
/// plant, repeat until the VAr outputs settle.
SimulationTrace run_offline(const FeederModel& feeder, const ControllerConfig& cfg,
                            const SimOptions& opts = {});

/// Timeline-driven closed loop with per-step VAr limit updates from the
/// instantaneous DER real power.
SimulationTrace run_online(const FeederModel& feeder, const ScenarioTimeline& timeline,
                           const ControllerConfig& cfg, const SimOptions& opts = {});

struct MetricsSummary {
    double time_avg_objective = 0.0;
    double max_v = 0.0;
    double min_v = 0.0;
    double final_mismatch = 0.0;
    int v_violation_steps = 0;
    int cap_violation_steps = 0;
    int iterations = 0;
    bool converged = false;
};

MetricsSummary metrics(const SimulationTrace& trace);

}  // namespace vvcsim
