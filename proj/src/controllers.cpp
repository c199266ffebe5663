#include "vvcsim/controllers.hpp"

#include <cmath>

namespace vvcsim {

const char* controller_name(ControllerKind kind) {
    switch (kind) {
        case ControllerKind::cdc: return "cdc";
        case ControllerKind::ddc: return "ddc";
        case ControllerKind::gpdc: return "gpdc";
        case ControllerKind::sgpdc: return "sgpdc";
        case ControllerKind::asalvc: return "asalvc";
    }
    return "?";
}

ControllerKind controller_from_name(const std::string& name) {
    if (name == "cdc") return ControllerKind::cdc;
    if (name == "ddc") return ControllerKind::ddc;
    if (name == "gpdc") return ControllerKind::gpdc;
    if (name == "sgpdc") return ControllerKind::sgpdc;
    if (name == "asalvc") return ControllerKind::asalvc;
    input_error("unknown controller '" + name + "'");
}

void validate_config(const ControllerConfig& cfg, int bus_count) {
    auto want = [&](const Eigen::VectorXd& v, const char* name, bool positive) {
        if (v.size() != bus_count)
            input_error(std::string(name) + " must have one entry per bus");
        if (positive && (v.array() <= 0.0).any())
            input_error(std::string(name) + " entries must be positive");
    };
    switch (cfg.kind) {
        case ControllerKind::cdc:
            want(cfg.slope, "slope", true);
            break;
        case ControllerKind::ddc:
            want(cfg.slope, "slope", true);
            if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) input_error("ddc alpha must lie in (0,1)");
            break;
        case ControllerKind::gpdc:
            want(cfg.slope, "slope", true);
            break;
        case ControllerKind::sgpdc:
            want(cfg.slope, "slope", true);
            want(cfg.scale, "scale", true);
            break;
        case ControllerKind::asalvc:
            want(cfg.metric, "metric", true);
            if (cfg.t_gamma < 1) input_error("t_gamma must be at least 1");
            break;
    }
    if (cfg.dead_band < 0.0) input_error("dead band must be nonnegative");
}

VarLimits der_var_limits(const DerSpec& der, double p_now) {
    switch (der.mode) {
        case DerMode::none: return {0.0, 0.0};
        case DerMode::fixed_band: return {der.q_min, der.q_max};
        case DerMode::capacity: {
            const double head = der.capacity * der.capacity - p_now * p_now;
            const double m = head > 0.0 ? std::sqrt(head) : 0.0;
            return {-m, m};
        }
    }
    return {0.0, 0.0};
}

namespace {

double dead_zone(double err, double band) {
    if (band <= 0.0) return err;
    if (err > band) return err - band;
    if (err < -band) return err + band;
    return 0.0;
}

}  // namespace

double cdc_step(double v_meas, double slope, double v_ref, double dead_band, VarLimits lim) {
    return clamp_var(-slope * dead_zone(v_meas - v_ref, dead_band), lim);
}

double ddc_step(DroopBusState& state, double v_meas, double slope, double alpha, double v_ref,
                VarLimits lim) {
    const double target = clamp_var(-slope * (v_meas - v_ref), lim);
    // The convex combination stays inside fixed limits; the outer clamp only
    // matters when online limits shrink below the previous output.
    const double q = clamp_var((1.0 - alpha) * state.q_prev + alpha * target, lim);
    state.q_prev = q;
    return q;
}

double gpdc_step(DroopBusState& state, double v_meas, double slope, double v_ref, VarLimits lim) {
    const double q = clamp_var(state.q_prev - slope * (v_meas - v_ref), lim);
    state.q_prev = q;
    return q;
}

double sgpdc_step(DroopBusState& state, double v_meas, double slope, double scale, double v_ref,
                  VarLimits lim) {
    const double q = clamp_var(state.q_prev - slope * scale * (v_meas - v_ref), lim);
    state.q_prev = q;
    return q;
}

namespace {

double asalvc_step(AsalvcBusState& state, double v_meas_prev, double metric, double v_ref,
                   VarLimits lim, bool online, int t_gamma) {
    const long t = state.step + 1;
    if (online && t % t_gamma == 0) {
        state.gamma = 1.0;
        state.mu = 0.0;
    }
    state.a = (1.0 + state.mu) / metric;
    state.b = (1.0 + state.mu) * state.q_prev - state.mu * state.q_prev2 +
              (state.mu / metric) * (state.v_prev2 - v_ref);
    const double q = clamp_var(-state.a * (v_meas_prev - v_ref) + state.b, lim);

    const double gamma_nxt = gamma_next(state.gamma);
    state.mu = (state.gamma - 1.0) / gamma_nxt;
    state.gamma = gamma_nxt;
    state.q_prev2 = state.q_prev;
    state.q_prev = q;
    state.v_prev2 = v_meas_prev;
    state.step = t;
    return q;
}

}  // namespace

double asalvc_offline_step(AsalvcBusState& state, double v_meas_prev, double metric, double v_ref,
                           VarLimits lim) {
    return asalvc_step(state, v_meas_prev, metric, v_ref, lim, false, 0);
}

double asalvc_online_step(AsalvcBusState& state, double v_meas_prev, double p_now,
                          const DerSpec& der, double metric, double v_ref, int t_gamma) {
    if (t_gamma < 1) input_error("t_gamma must be at least 1");
    return asalvc_step(state, v_meas_prev, metric, v_ref, der_var_limits(der, p_now), true,
                       t_gamma);
}

EquivalenceTrace asalvc_equivalence_trace(const SensitivityModel& sens,
                                          const ObjectiveWeight& phi, const StepMetric& metric,
                                          const ExogenousState& d, const Eigen::VectorXd& v_ref,
                                          const Eigen::VectorXd& q_lo, const Eigen::VectorXd& q_hi,
                                          int steps) {
    const int n = sens.size();

    const BoxQP problem(sens, phi, d, v_ref, q_lo, q_hi);
    GfgmOptions opts;
    opts.tol = 0.0;  // run the full horizon
    opts.max_iter = steps;
    const GfgmTrajectory traj = gfgm_solve(problem, metric, opts);

    EquivalenceTrace trace;
    trace.q_optimizer.resize(steps, n);
    trace.q_controller.resize(steps, n);

    std::vector<AsalvcBusState> states(n);
    for (auto& st : states) st.v_prev2 = v_ref(0);
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd v = v_linear(sens, q, d);
    for (int k = 0; k < steps; ++k) {
        for (int i = 0; i < n; ++i)
            q(i) = asalvc_offline_step(states[i], v(i), metric.d(i), v_ref(i),
                                       {q_lo(i), q_hi(i)});
        v = v_linear(sens, q, d);

        trace.q_optimizer.row(k) = traj.steps[k].q.transpose();
        trace.q_controller.row(k) = q.transpose();
    }
    trace.max_deviation = (trace.q_optimizer - trace.q_controller).cwiseAbs().maxCoeff();
    return trace;
}

}  // namespace vvcsim
