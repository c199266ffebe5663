#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vvcsim {

enum class ErrorKind { input, numerical };

/// Toolkit-wide error. `kind()` distinguishes bad input (malformed files,
/// invalid topology) from numerical failure (divergence, factorization
/// breakdown); the CLI maps them to exit codes 2 and 1.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void input_error(const std::string& msg) { throw Error(ErrorKind::input, msg); }
[[noreturn]] inline void numerical_error(const std::string& msg) { throw Error(ErrorKind::numerical, msg); }

enum class DerMode { none, fixed_band, capacity };

/// Inverter description for one bus. `fixed_band` DERs have constant VAr
/// bounds; `capacity` DERs derive them online from the apparent-power rating
/// and the instantaneous real output.
struct DerSpec {
    DerMode mode = DerMode::none;
    double capacity = 0.0;  // pu apparent power rating
    double q_min = 0.0;     // pu, fixed_band mode only
    double q_max = 0.0;
};

/// Static description of a radial feeder. Buses are stored with dense
/// indices 1..N (0 is the slack); `labels` keeps the original file ids.
/// All electrical quantities are per-unit on the declared bases. Injections
/// are generator-positive, so loads carry negative sign.
struct NetworkCase {
    struct Line {
        int from = 0;  // sending (predecessor) bus, dense index
        int to = 0;    // receiving bus, dense index
        double r = 0.0;
        double x = 0.0;
    };

    int bus_count = 0;  // N, slack excluded
    double slack_voltage = 1.0;
    double base_kv = 0.0;
    double base_kva = 0.0;
    std::int64_t slack_label = 0;
    std::vector<std::int64_t> labels;  // labels[j-1] = original id of bus j
    std::vector<Line> lines;           // lines[j-1] is the line into bus j
    Eigen::VectorXd p_load;            // pu injection, length N
    Eigen::VectorXd q_load;            // pu injection, length N
    std::vector<DerSpec> ders;         // length N

    int lookup(std::int64_t label) const;  // dense index for a file id, -1 if unknown
};

/// Parent/children/descendant structure of the tree, plus the deterministic
/// bus processing order (breadth-first from the slack, children by index).
struct Topology {
    std::vector<int> parent;                    // parent[j-1] for bus j
    std::vector<std::vector<int>> children;     // indexed 0..N
    std::vector<std::vector<int>> descendants;  // strict descendants of bus j at [j-1]
    std::vector<int> order;                     // topological order over 1..N
};

/// Reduced incidence decomposition: full incidence is [m0; M^T]^T with the
/// convention that the column of the line into bus j carries +1 at the
/// sending bus and -1 at bus j.
struct IncidenceDecomposition {
    Eigen::VectorXd m0;  // slack row, length N
    Eigen::MatrixXd M;   // N x N, rows = non-slack buses, cols = lines
};

/// Structural validation: one line per non-slack bus, positive reactance,
/// nonnegative resistance, consistent array lengths. Throws Error on
/// violation. Connectivity is checked by build_topology.
void validate_case(const NetworkCase& net);

Topology build_topology(const NetworkCase& net);

IncidenceDecomposition incidence(const NetworkCase& net, const Topology& topo);

}  // namespace vvcsim
