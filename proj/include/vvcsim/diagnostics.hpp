#pragma once

#include "vvcsim/simulator.hpp"

#include <functional>
#include <string>
#include <vector>

namespace vvcsim {

struct CheckItem {
    std::string name;
    bool pass = false;
    double value = 0.0;  // the quantity the check inspected
};

/// Test hooks: deliberate corruption of the matrix under test, for negative
/// controls of the battery itself. Production callers leave them empty.
struct CheckHooks {
    std::function<void(Eigen::MatrixXd&)> corrupt_sensitivity;
};

/// Invariant battery behind the `check` subcommand: sensitivity symmetry and
/// definiteness (reporting sigma_min), the path-overlap cross-check, the
/// inverse-weight identity, incidence column sums and seed-metric
/// feasibility.
std::vector<CheckItem> run_check_battery(const FeederModel& feeder, const CheckHooks& hooks = {});

}  // namespace vvcsim
