#include "vvcsim/case_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace vvcsim {

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) input_error("cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        input_error("parse failure in '" + path + "': " + e.what());
    }
    return doc;
}

double require_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_number())
        input_error("missing numeric '" + std::string(key) + "' in " + where);
    return obj[key].get<double>();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

NetworkCase load_case(const std::string& path) {
    const json doc = read_json(path);
    if (!doc.is_object()) input_error("case file must hold a JSON object");

    NetworkCase net;
    net.base_kv = require_number(doc, "base_kv", "case");
    net.base_kva = require_number(doc, "base_kva", "case");
    net.slack_voltage = require_number(doc, "slack_voltage", "case");
    if (!(net.base_kv > 0.0) || !(net.base_kva > 0.0)) input_error("bases must be positive");
    const double z_base = 1000.0 * net.base_kv * net.base_kv / net.base_kva;

    if (!doc.contains("buses") || !doc["buses"].is_array() || doc["buses"].empty())
        input_error("case needs a non-empty 'buses' array");
    if (!doc.contains("lines") || !doc["lines"].is_array())
        input_error("case needs a 'lines' array");

    struct BusIn {
        double p = 0.0, q = 0.0;
        DerSpec der;
    };
    std::map<std::int64_t, BusIn> buses;
    for (const auto& b : doc["buses"]) {
        if (!b.contains("id") || !b["id"].is_number_integer())
            input_error("every bus needs an integer 'id'");
        const std::int64_t id = b["id"].get<std::int64_t>();
        if (buses.count(id)) input_error("duplicate bus id " + std::to_string(id));
        BusIn in;
        in.p = require_number(b, "p_load_kw", "bus " + std::to_string(id)) / net.base_kva;
        in.q = require_number(b, "q_load_kvar", "bus " + std::to_string(id)) / net.base_kva;
        if (b.contains("der") && !b["der"].is_null()) {
            const auto& d = b["der"];
            const bool has_band = d.contains("q_min_kvar") || d.contains("q_max_kvar");
            if (has_band) {
                in.der.mode = DerMode::fixed_band;
                in.der.q_min =
                    require_number(d, "q_min_kvar", "der of bus " + std::to_string(id)) /
                    net.base_kva;
                in.der.q_max =
                    require_number(d, "q_max_kvar", "der of bus " + std::to_string(id)) /
                    net.base_kva;
                if (d.contains("capacity_kva"))
                    in.der.capacity = d["capacity_kva"].get<double>() / net.base_kva;
            } else if (d.contains("capacity_kva")) {
                in.der.mode = DerMode::capacity;
                in.der.capacity =
                    require_number(d, "capacity_kva", "der of bus " + std::to_string(id)) /
                    net.base_kva;
            } else {
                input_error("der of bus " + std::to_string(id) +
                            " needs capacity_kva or q_min/q_max_kvar");
            }
        }
        buses.emplace(id, in);
    }

    // The slack is whichever line endpoint never occurs as a listed bus.
    std::set<std::int64_t> endpoints;
    bool any_ohm = false, any_pu = false;
    for (const auto& l : doc["lines"]) {
        if (!l.contains("from") || !l.contains("to")) input_error("line needs 'from' and 'to'");
        endpoints.insert(l["from"].get<std::int64_t>());
        endpoints.insert(l["to"].get<std::int64_t>());
        if (l.contains("r_ohm") || l.contains("x_ohm")) any_ohm = true;
        if (l.contains("r_pu") || l.contains("x_pu")) any_pu = true;
    }
    if (any_ohm && any_pu) input_error("impedances must be all-ohm or all-pu, never mixed");
    if (!any_ohm && !any_pu) input_error("lines carry no impedance fields");

    std::vector<std::int64_t> slacks;
    for (std::int64_t id : endpoints)
        if (!buses.count(id)) slacks.push_back(id);
    if (slacks.size() != 1)
        input_error("expected exactly one slack id (a line endpoint without a bus entry), found " +
                    std::to_string(slacks.size()));
    net.slack_label = slacks[0];

    net.bus_count = static_cast<int>(buses.size());
    net.labels.reserve(buses.size());
    for (const auto& [id, in] : buses) net.labels.push_back(id);  // ascending map order

    const int n = net.bus_count;
    net.p_load.resize(n);
    net.q_load.resize(n);
    net.ders.assign(n, {});
    for (int j = 0; j < n; ++j) {
        const BusIn& in = buses.at(net.labels[j]);
        net.p_load(j) = in.p;
        net.q_load(j) = in.q;
        net.ders[j] = in.der;
    }

    if (doc["lines"].size() != static_cast<std::size_t>(n))
        input_error("not radial: expected " + std::to_string(n) + " lines, got " +
                    std::to_string(doc["lines"].size()));
    std::vector<NetworkCase::Line> unordered;
    for (const auto& l : doc["lines"]) {
        const int from = net.lookup(l["from"].get<std::int64_t>());
        const int to = net.lookup(l["to"].get<std::int64_t>());
        if (from < 0 || to < 0) input_error("line references an unknown bus id");
        if (to == 0) input_error("not radial: a line terminates at the slack");
        double r = 0.0, x = 0.0;
        const std::string where = "line into id " + std::to_string(l["to"].get<std::int64_t>());
        if (any_ohm) {
            r = require_number(l, "r_ohm", where) / z_base;
            x = require_number(l, "x_ohm", where) / z_base;
        } else {
            r = require_number(l, "r_pu", where);
            x = require_number(l, "x_pu", where);
        }
        unordered.push_back({from, to, r, x});
    }

    // One line per receiving bus, stored at position to-1.
    net.lines.assign(n, {});
    std::vector<bool> filled(n, false);
    for (const auto& line : unordered) {
        if (filled[line.to - 1])
            input_error("not radial: bus id " + std::to_string(net.labels[line.to - 1]) +
                        " has multiple predecessors");
        filled[line.to - 1] = true;
        net.lines[line.to - 1] = line;
    }

    validate_case(net);
    build_topology(net);  // connectivity / cycle diagnostics
    return net;
}

void save_case(const NetworkCase& net, const std::string& path) {
    json doc;
    doc["base_kv"] = net.base_kv;
    doc["base_kva"] = net.base_kva;
    doc["slack_voltage"] = net.slack_voltage;

    json buses = json::array();
    for (int j = 0; j < net.bus_count; ++j) {
        json b;
        b["id"] = net.labels[j];
        b["p_load_kw"] = net.p_load(j) * net.base_kva;
        b["q_load_kvar"] = net.q_load(j) * net.base_kva;
        const DerSpec& der = net.ders[j];
        if (der.mode == DerMode::fixed_band) {
            b["der"] = {{"q_min_kvar", der.q_min * net.base_kva},
                        {"q_max_kvar", der.q_max * net.base_kva}};
        } else if (der.mode == DerMode::capacity) {
            b["der"] = {{"capacity_kva", der.capacity * net.base_kva}};
        }
        buses.push_back(std::move(b));
    }
    doc["buses"] = std::move(buses);

    json lines = json::array();
    for (int j = 1; j <= net.bus_count; ++j) {
        const auto& line = net.lines[j - 1];
        lines.push_back({{"from", line.from == 0 ? net.slack_label : net.labels[line.from - 1]},
                         {"to", net.labels[line.to - 1]},
                         {"r_pu", line.r},
                         {"x_pu", line.x}});
    }
    doc["lines"] = std::move(lines);

    std::ofstream out(path);
    if (!out) input_error("cannot write '" + path + "'");
    out << doc.dump(2) << "\n";
}

ScenarioTimeline load_timeline(const std::string& path, const NetworkCase& net) {
    std::ifstream in(path);
    if (!in) input_error("cannot open '" + path + "'");
    const int n = net.bus_count;

    std::string header;
    if (!std::getline(in, header)) input_error("empty timeline '" + path + "'");
    std::vector<std::string> expect{"time_s"};
    for (int j = 0; j < n; ++j) {
        const std::string id = std::to_string(net.labels[j]);
        expect.push_back("p_load_" + id);
        expect.push_back("q_load_" + id);
        expect.push_back("p_pv_" + id);
    }
    {
        std::stringstream ss(header);
        std::string field;
        std::size_t col = 0;
        while (std::getline(ss, field, ',')) {
            if (col >= expect.size() || field != expect[col])
                input_error("timeline header mismatch at column " + std::to_string(col + 1));
            ++col;
        }
        if (col != expect.size()) input_error("timeline header is short");
    }

    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<double> row;
        while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
        if (row.size() != expect.size())
            input_error("timeline row " + std::to_string(rows.size() + 1) + " has " +
                        std::to_string(row.size()) + " fields");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) input_error("timeline has no data rows");

    ScenarioTimeline tl;
    const int total = static_cast<int>(rows.size());
    tl.p_load.resize(total, n);
    tl.q_load.resize(total, n);
    tl.p_pv.resize(total, n);
    tl.dt = total > 1 ? rows[1][0] - rows[0][0] : rows[0][0];
    if (!(tl.dt > 0.0)) input_error("timeline time column must increase");
    for (int t = 0; t < total; ++t) {
        if (t > 0 && std::abs((rows[t][0] - rows[t - 1][0]) - tl.dt) > 1e-9 * tl.dt)
            input_error("timeline step duration is not uniform");
        for (int j = 0; j < n; ++j) {
            tl.p_load(t, j) = rows[t][1 + 3 * j];
            tl.q_load(t, j) = rows[t][2 + 3 * j];
            tl.p_pv(t, j) = rows[t][3 + 3 * j];
        }
    }
    return tl;
}

void save_timeline(const ScenarioTimeline& timeline, const NetworkCase& net,
                   const std::string& path) {
    std::ofstream out(path);
    if (!out) input_error("cannot write '" + path + "'");
    out << "time_s";
    for (int j = 0; j < net.bus_count; ++j) {
        const std::string id = std::to_string(net.labels[j]);
        out << ",p_load_" << id << ",q_load_" << id << ",p_pv_" << id;
    }
    out << "\n";
    for (int t = 0; t < timeline.p_load.rows(); ++t) {
        out << fmt(timeline.dt * (t + 1));
        for (int j = 0; j < net.bus_count; ++j)
            out << "," << fmt(timeline.p_load(t, j)) << "," << fmt(timeline.q_load(t, j)) << ","
                << fmt(timeline.p_pv(t, j));
        out << "\n";
    }
}

void write_trace_csv(const SimulationTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) input_error("cannot write '" + path + "'");
    out << "step,time_s,objective,mismatch,v_min,v_max,dq_inf,saturated,v_violation,"
           "cap_violation\n";
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
        const StepRecord& r = trace.steps[k];
        out << k + 1 << "," << fmt(r.time_s) << "," << fmt(r.objective) << "," << fmt(r.mismatch)
            << "," << fmt(r.v_min) << "," << fmt(r.v_max) << "," << fmt(r.dq_inf) << ","
            << r.saturated << "," << int(r.v_violation) << "," << int(r.cap_violation) << "\n";
    }
}

void write_run_summary(const RunSummary& summary, const std::string& path) {
    json doc;
    doc["case"] = summary.case_path;
    doc["scenario"] = summary.scenario;
    doc["plant"] = summary.plant;
    json ctrls;
    for (const auto& [name, m] : summary.controllers) {
        ctrls[name] = {{"iterations", m.iterations},
                       {"converged", m.converged},
                       {"final_mismatch", m.final_mismatch},
                       {"time_avg_objective", m.time_avg_objective},
                       {"max_v", m.max_v},
                       {"min_v", m.min_v},
                       {"v_violation_steps", m.v_violation_steps},
                       {"cap_violation_steps", m.cap_violation_steps}};
    }
    doc["controllers"] = std::move(ctrls);
    if (summary.has_oracle)
        doc["oracle"] = {{"objective", summary.oracle_objective},
                         {"kkt_residual", summary.oracle_kkt}};
    std::ofstream out(path);
    if (!out) input_error("cannot write '" + path + "'");
    out << doc.dump(2) << "\n";
}

void write_metric_json(const StepMetric& metric, const PsdReport& report, const NetworkCase& net,
                       const std::string& path) {
    json doc;
    json values;
    for (int j = 0; j < net.bus_count; ++j)
        values[std::to_string(net.labels[j])] = metric.d(j);
    doc["L"] = std::move(values);
    doc["trace"] = metric.d.sum();
    doc["provenance"] = metric.provenance == MetricProvenance::seed ? "seed" : "optimized";
    doc["certificate"] = {{"min_eigenvalue", report.min_eig},
                          {"eps", report.eps},
                          {"feasible", report.psd}};
    std::ofstream out(path);
    if (!out) input_error("cannot write '" + path + "'");
    out << doc.dump(2) << "\n";
}

void write_trajectory_csv(const GfgmTrajectory& traj, const BoundCheck& rate,
                          const BoundCheck& dist, const std::string& path) {
    std::ofstream out(path);
    if (!out) input_error("cannot write '" + path + "'");
    out << "k,f,gap,bound_eq11,dist,bound_prop3\n";
    for (std::size_t i = 0; i < traj.steps.size(); ++i) {
        out << traj.steps[i].k << "," << fmt(traj.steps[i].f) << "," << fmt(rate.lhs[i]) << ","
            << fmt(rate.rhs[i]) << "," << fmt(dist.lhs[i]) << "," << fmt(dist.rhs[i]) << "\n";
    }
}

}  // namespace vvcsim
