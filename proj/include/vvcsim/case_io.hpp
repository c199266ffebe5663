#pragma once

#include "vvcsim/gfgm.hpp"
#include "vvcsim/network.hpp"
#include "vvcsim/simulator.hpp"
#include "vvcsim/synthesis.hpp"

#include <map>
#include <string>

namespace vvcsim {

/// Reads a case JSON document. Bus ids may be arbitrary integer labels; they
/// are mapped to dense indices in ascending label order and lines are
/// reordered so the line into bus j sits at position j-1. The slack is the
/// unique id that appears in `lines` but not in `buses`.
NetworkCase load_case(const std::string& path);

void save_case(const NetworkCase& net, const std::string& path);

/// Timeline CSV: header `time_s` then `p_load_<id>,q_load_<id>,p_pv_<id>` per
/// non-slack bus, injections in pu.
ScenarioTimeline load_timeline(const std::string& path, const NetworkCase& net);
void save_timeline(const ScenarioTimeline& timeline, const NetworkCase& net,
                   const std::string& path);

void write_trace_csv(const SimulationTrace& trace, const std::string& path);

/// Per-controller metrics plus an optional oracle block, as one JSON file.
struct RunSummary {
    std::string case_path;
    std::string scenario;
    std::string plant;
    std::map<std::string, MetricsSummary> controllers;
    bool has_oracle = false;
    double oracle_objective = 0.0;
    double oracle_kkt = 0.0;
};
void write_run_summary(const RunSummary& summary, const std::string& path);

/// Metric JSON {bus label: L_i} with the feasibility certificate embedded.
void write_metric_json(const StepMetric& metric, const PsdReport& report, const NetworkCase& net,
                       const std::string& path);

/// Optimizer trajectory table: k, f, gap, bound_eq11, dist, bound_prop3.
void write_trajectory_csv(const GfgmTrajectory& traj, const BoundCheck& rate,
                          const BoundCheck& dist, const std::string& path);

}  // namespace vvcsim
