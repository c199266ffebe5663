#include "vvcsim/simulator.hpp"

#include "rng.hpp"

#include <cmath>

namespace vvcsim {

FeederModel build_feeder(NetworkCase net, const TraceMinOptions& metric_opts) {
    FeederModel feeder;
    feeder.net = std::move(net);
    feeder.topo = build_topology(feeder.net);
    feeder.inc = incidence(feeder.net, feeder.topo);
    feeder.sens = build_sensitivity(feeder.net, feeder.topo, feeder.inc);
    feeder.phi = phi_from_A(feeder.net, feeder.inc);
    feeder.metric = solve_trace_min_metric(feeder.sens.A, metric_opts);
    return feeder;
}

ExogenousState nominal_state(const NetworkCase& net) {
    return {net.p_load, -net.q_load};
}

ControllerConfig default_config(ControllerKind kind, const FeederModel& feeder) {
    const int n = feeder.net.bus_count;
    ControllerConfig cfg;
    cfg.kind = kind;
    switch (kind) {
        case ControllerKind::cdc:
        case ControllerKind::gpdc:
            cfg.slope = Eigen::VectorXd::Ones(n);
            break;
        case ControllerKind::ddc:
            cfg.slope = Eigen::VectorXd::Ones(n);
            cfg.alpha = 0.1;
            break;
        case ControllerKind::sgpdc: {
            cfg.slope = Eigen::VectorXd::Constant(n, 0.01);
            BoxQP problem(feeder.sens, feeder.phi, nominal_state(feeder.net),
                          Eigen::VectorXd::Ones(n), Eigen::VectorXd::Zero(n),
                          Eigen::VectorXd::Zero(n));
            cfg.scale = problem.hessian().diagonal().cwiseInverse();
            break;
        }
        case ControllerKind::asalvc:
            cfg.metric = feeder.metric.d;
            cfg.t_gamma = 6;
            break;
    }
    return cfg;
}

namespace {

// Per-bus dispatch over the five local laws; owns all bus states.
class ControllerBank {
public:
    ControllerBank(const ControllerConfig& cfg, int n) : cfg_(cfg) {
        validate_config(cfg, n);
        droop_.assign(n, {});
        asalvc_.assign(n, {});
        for (auto& st : asalvc_) st.v_prev2 = cfg.v_ref;
    }

    double step_bus(int i, double v_meas, VarLimits lim) {
        switch (cfg_.kind) {
            case ControllerKind::cdc:
                return cdc_step(v_meas, cfg_.slope(i), cfg_.v_ref, cfg_.dead_band, lim);
            case ControllerKind::ddc:
                return ddc_step(droop_[i], v_meas, cfg_.slope(i), cfg_.alpha, cfg_.v_ref, lim);
            case ControllerKind::gpdc:
                return gpdc_step(droop_[i], v_meas, cfg_.slope(i), cfg_.v_ref, lim);
            case ControllerKind::sgpdc:
                return sgpdc_step(droop_[i], v_meas, cfg_.slope(i), cfg_.scale(i), cfg_.v_ref,
                                  lim);
            case ControllerKind::asalvc:
                return asalvc_offline_step(asalvc_[i], v_meas, cfg_.metric(i), cfg_.v_ref, lim);
        }
        return 0.0;
    }

    double step_bus_online(int i, double v_meas, double p_now, const DerSpec& der) {
        if (cfg_.kind == ControllerKind::asalvc)
            return asalvc_online_step(asalvc_[i], v_meas, p_now, der, cfg_.metric(i), cfg_.v_ref,
                                      cfg_.t_gamma);
        return step_bus(i, v_meas, der_var_limits(der, p_now));
    }

private:
    ControllerConfig cfg_;
    std::vector<DroopBusState> droop_;
    std::vector<AsalvcBusState> asalvc_;
};

Eigen::VectorXd solve_plant(const FeederModel& feeder, PlantKind plant, const Eigen::VectorXd& q_g,
                            const ExogenousState& d) {
    if (plant == PlantKind::linear) return v_linear(feeder.sens, q_g, d);
    return solve_branch_flow(feeder.net, feeder.topo, d.p, q_g - d.q_c).v;
}

double gaussian(std::uint64_t& state) {
    // Box-Muller on the portable uniform.
    const double u1 = std::max(detail::uniform01(state), 1e-300);
    const double u2 = detail::uniform01(state);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

StepRecord record_step(const FeederModel& feeder, const SimOptions& opts, double time_s,
                       const Eigen::VectorXd& v, const Eigen::VectorXd& q,
                       const std::vector<VarLimits>& lims, double dq_inf, double v_ref) {
    StepRecord rec;
    rec.time_s = time_s;
    const Eigen::VectorXd r = v.array() - v_ref;
    rec.objective = 0.5 * r.dot(feeder.phi.apply(r));
    rec.mismatch = r.norm();
    rec.v_min = v.minCoeff();
    rec.v_max = v.maxCoeff();
    rec.dq_inf = dq_inf;
    rec.v_violation = rec.v_min < opts.band_lo || rec.v_max > opts.band_hi;
    for (int i = 0; i < q.size(); ++i) {
        if (q(i) > lims[i].hi + 1e-12 || q(i) < lims[i].lo - 1e-12) rec.cap_violation = true;
        const bool has_range = lims[i].hi - lims[i].lo > 0.0;
        if (has_range && (q(i) >= lims[i].hi - 1e-15 || q(i) <= lims[i].lo + 1e-15))
            rec.saturated += 1;
    }
    return rec;
}

}  // namespace

SimulationTrace run_offline(const FeederModel& feeder, const ControllerConfig& cfg,
                            const SimOptions& opts) {
    const int n = feeder.net.bus_count;
    const ExogenousState d = nominal_state(feeder.net);
    ControllerBank bank(cfg, n);

    std::vector<VarLimits> lims(n);
    for (int i = 0; i < n; ++i) lims[i] = der_var_limits(feeder.net.ders[i], 0.0);

    SimulationTrace trace;
    if (opts.store_series) {
        trace.v_series.resize(opts.max_iter, n);
        trace.q_series.resize(opts.max_iter, n);
    }

    std::uint64_t noise = detail::rng_seed(opts.noise_seed);
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd v = solve_plant(feeder, opts.plant, q, d);

    int k = 0;
    for (k = 1; k <= opts.max_iter; ++k) {
        Eigen::VectorXd v_meas = v;
        if (opts.noise_std > 0.0)
            for (int i = 0; i < n; ++i) v_meas(i) += opts.noise_std * gaussian(noise);

        Eigen::VectorXd q_next(n);
        for (int i = 0; i < n; ++i) q_next(i) = bank.step_bus(i, v_meas(i), lims[i]);
        const double dq = (q_next - q).lpNorm<Eigen::Infinity>();
        q = q_next;
        v = solve_plant(feeder, opts.plant, q, d);

        trace.steps.push_back(record_step(feeder, opts, double(k), v, q, lims, dq, cfg.v_ref));
        if (opts.store_series) {
            trace.v_series.row(k - 1) = v.transpose();
            trace.q_series.row(k - 1) = q.transpose();
        }
        if (dq <= opts.tol) {
            trace.converged = true;
            break;
        }
    }
    trace.iterations = static_cast<int>(trace.steps.size());
    if (opts.store_series) {
        trace.v_series.conservativeResize(trace.iterations, n);
        trace.q_series.conservativeResize(trace.iterations, n);
    }
    trace.v_final = v;
    trace.q_final = q;
    return trace;
}

SimulationTrace run_online(const FeederModel& feeder, const ScenarioTimeline& timeline,
                           const ControllerConfig& cfg, const SimOptions& opts) {
    const int n = feeder.net.bus_count;
    const int total = static_cast<int>(timeline.p_load.rows());
    if (timeline.q_load.rows() != total || timeline.p_pv.rows() != total ||
        timeline.p_load.cols() != n || timeline.q_load.cols() != n || timeline.p_pv.cols() != n)
        input_error("timeline dimensions do not match the case");

    ControllerBank bank(cfg, n);
    SimulationTrace trace;
    if (opts.store_series) {
        trace.v_series.resize(total, n);
        trace.q_series.resize(total, n);
    }

    std::uint64_t noise = detail::rng_seed(opts.noise_seed);
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
    ExogenousState d{timeline.p_load.row(0).transpose() + timeline.p_pv.row(0).transpose(),
                     -timeline.q_load.row(0).transpose()};
    Eigen::VectorXd v = solve_plant(feeder, opts.plant, q, d);

    std::vector<VarLimits> lims(n);
    for (int t = 1; t <= total; ++t) {
        d.p = timeline.p_load.row(t - 1).transpose() + timeline.p_pv.row(t - 1).transpose();
        d.q_c = -timeline.q_load.row(t - 1).transpose();

        Eigen::VectorXd v_meas = v;
        if (opts.noise_std > 0.0)
            for (int i = 0; i < n; ++i) v_meas(i) += opts.noise_std * gaussian(noise);

        Eigen::VectorXd q_next(n);
        for (int i = 0; i < n; ++i) {
            const double p_now = timeline.p_pv(t - 1, i);
            lims[i] = der_var_limits(feeder.net.ders[i], p_now);
            q_next(i) = bank.step_bus_online(i, v_meas(i), p_now, feeder.net.ders[i]);
        }
        const double dq = (q_next - q).lpNorm<Eigen::Infinity>();
        q = q_next;
        try {
            v = solve_plant(feeder, opts.plant, q, d);
        } catch (const Error& err) {
            trace.aborted = true;
            trace.abort_reason = err.what();
            break;
        }

        trace.steps.push_back(
            record_step(feeder, opts, timeline.dt * t, v, q, lims, dq, cfg.v_ref));
        if (opts.store_series) {
            trace.v_series.row(t - 1) = v.transpose();
            trace.q_series.row(t - 1) = q.transpose();
        }
    }
    trace.iterations = static_cast<int>(trace.steps.size());
    if (opts.store_series) {
        trace.v_series.conservativeResize(trace.iterations, n);
        trace.q_series.conservativeResize(trace.iterations, n);
    }
    trace.v_final = v;
    trace.q_final = q;
    return trace;
}

ScenarioTimeline make_scenario(const NetworkCase& net, const ScenarioParams& params,
                               std::uint64_t seed) {
    const int n = net.bus_count;
    const int total = params.steps;
    if (total < 1) input_error("scenario needs at least one step");
    if (!(params.dt > 0.0)) input_error("scenario dt must be positive");

    ScenarioTimeline tl;
    tl.dt = params.dt;
    tl.p_load.resize(total, n);
    tl.q_load.resize(total, n);
    tl.p_pv = Eigen::MatrixXd::Zero(total, n);

    std::uint64_t rng = detail::rng_seed(seed);
    for (int t = 0; t < total; ++t) {
        double load_mult = 1.0;
        double pv_shape = 0.0;
        if (params.kind == ScenarioKind::sudden_change && t + 1 >= params.change_step)
            load_mult = params.multiplier;
        if (params.kind == ScenarioKind::continuous) {
            const double h = std::fmod(params.dt * t / 3600.0, 24.0);
            // Two load peaks and a night trough around the nominal level.
            const double shape = 0.9 * std::exp(-0.5 * std::pow((h - 19.0) / 2.4, 2)) +
                                 0.5 * std::exp(-0.5 * std::pow((h - 8.0) / 2.2, 2)) -
                                 0.8 * std::exp(-0.5 * std::pow((h - 3.5) / 3.0, 2));
            load_mult = 1.0 + params.load_swing * shape;
            const double s = std::sin(3.141592653589793 * (h - 6.0) / 12.0);
            pv_shape = h > 6.0 && h < 18.0 ? s * s : 0.0;
        }
        for (int i = 0; i < n; ++i) {
            double lm = load_mult;
            if (params.kind == ScenarioKind::continuous && params.load_sigma > 0.0)
                lm *= 1.0 + params.load_sigma * (2.0 * detail::uniform01(rng) - 1.0);
            tl.p_load(t, i) = net.p_load(i) * lm;
            tl.q_load(t, i) = net.q_load(i) * lm;
            const DerSpec& der = net.ders[i];
            if (params.kind == ScenarioKind::continuous && der.mode == DerMode::capacity &&
                pv_shape > 0.0) {
                double pv = der.capacity * params.pv_peak_fraction * pv_shape;
                if (params.pv_sigma > 0.0)
                    pv *= 1.0 + params.pv_sigma * (2.0 * detail::uniform01(rng) - 1.0);
                tl.p_pv(t, i) = std::min(std::max(pv, 0.0), 0.98 * der.capacity);
            }
        }
    }
    return tl;
}

MetricsSummary metrics(const SimulationTrace& trace) {
    if (trace.steps.empty()) input_error("empty trace");
    MetricsSummary s;
    s.min_v = trace.steps.front().v_min;
    s.max_v = trace.steps.front().v_max;
    for (const auto& rec : trace.steps) {
        s.time_avg_objective += rec.objective;
        s.min_v = std::min(s.min_v, rec.v_min);
        s.max_v = std::max(s.max_v, rec.v_max);
        if (rec.v_violation) s.v_violation_steps += 1;
        if (rec.cap_violation) s.cap_violation_steps += 1;
    }
    s.time_avg_objective /= double(trace.steps.size());
    s.final_mismatch = trace.steps.back().mismatch;
    s.iterations = trace.iterations;
    s.converged = trace.converged;
    return s;
}

}  // namespace vvcsim
