#pragma once

#include "vvcsim/gfgm.hpp"
#include "vvcsim/lindistflow.hpp"
#include "vvcsim/network.hpp"
#include "vvcsim/weights.hpp"

namespace vvcsim {

enum class ControllerKind { cdc, ddc, gpdc, sgpdc, asalvc };

const char* controller_name(ControllerKind kind);
ControllerKind controller_from_name(const std::string& name);

/// Per-feeder controller settings. Vector-valued fields hold one entry per
/// non-slack bus; the reference voltage is a scalar broadcast.
struct ControllerConfig {
    ControllerKind kind = ControllerKind::asalvc;
    double v_ref = 1.0;
    Eigen::VectorXd slope;   // a_i (cdc, ddc, gpdc, sgpdc)
    double alpha = 0.1;      // ddc weight, in (0, 1)
    Eigen::VectorXd scale;   // d_i (sgpdc)
    Eigen::VectorXd metric;  // L_i (asalvc)
    int t_gamma = 6;         // asalvc online reset period, steps
    double dead_band = 0.0;  // cdc, symmetric around v_ref
};

void validate_config(const ControllerConfig& cfg, int bus_count);

struct VarLimits {
    double lo = 0.0;
    double hi = 0.0;
};

/// Instantaneous VAr bounds of a DER given its current real power output.
VarLimits der_var_limits(const DerSpec& der, double p_now);

inline double clamp_var(double q, VarLimits lim) { return std::min(std::max(q, lim.lo), lim.hi); }

struct DroopBusState {
    double q_prev = 0.0;
};

/// Bus-local memory of the self-adaptive controller: the previous two VAr
/// outputs, the voltage measurement from two steps back, and the momentum
/// counters. `a` and `b` expose the droop coefficients of the last step.
struct AsalvcBusState {
    double q_prev = 0.0;
    double q_prev2 = 0.0;
    double v_prev2 = 1.0;  // overwritten before it can matter (mu = 0 on steps 1-2)
    double gamma = 1.0;
    double mu = 0.0;
    double a = 0.0;
    double b = 0.0;
    long step = 0;
};

// Each step reads one bus's own measurement and state only.
double cdc_step(double v_meas, double slope, double v_ref, double dead_band, VarLimits lim);
double ddc_step(DroopBusState& state, double v_meas, double slope, double alpha, double v_ref,
                VarLimits lim);
double gpdc_step(DroopBusState& state, double v_meas, double slope, double v_ref, VarLimits lim);
double sgpdc_step(DroopBusState& state, double v_meas, double slope, double scale, double v_ref,
                  VarLimits lim);

/// One offline iteration: refresh mu, slope and intercept from local history,
/// apply the droop law to the previous voltage measurement, advance gamma.
double asalvc_offline_step(AsalvcBusState& state, double v_meas_prev, double metric, double v_ref,
                           VarLimits lim);

/// Online variant: VAr limits come from the DER rating and its instantaneous
/// real power, and gamma/mu restart every t_gamma steps.
double asalvc_online_step(AsalvcBusState& state, double v_meas_prev, double p_now,
                          const DerSpec& der, double metric, double v_ref, int t_gamma);

struct EquivalenceTrace {
    Eigen::MatrixXd q_optimizer;   // steps x N
    Eigen::MatrixXd q_controller;  // steps x N
    double max_deviation = 0.0;
};

/// Runs the fast gradient iteration and the local controller side by side on
/// the linear model from identical initial conditions. With the weight set to
/// the exact inverse of A the two trajectories coincide.
EquivalenceTrace asalvc_equivalence_trace(const SensitivityModel& sens,
                                          const ObjectiveWeight& phi, const StepMetric& metric,
                                          const ExogenousState& d, const Eigen::VectorXd& v_ref,
                                          const Eigen::VectorXd& q_lo, const Eigen::VectorXd& q_hi,
                                          int steps);

}  // namespace vvcsim
