#include "vvcsim/diagnostics.hpp"

#include <Eigen/Eigenvalues>

namespace vvcsim {

std::vector<CheckItem> run_check_battery(const FeederModel& feeder, const CheckHooks& hooks) {
    const int n = feeder.net.bus_count;
    Eigen::MatrixXd a = feeder.sens.A;
    if (hooks.corrupt_sensitivity) hooks.corrupt_sensitivity(a);

    std::vector<CheckItem> items;
    const double scale = a.cwiseAbs().maxCoeff();

    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    items.push_back({"sensitivity symmetric", asym <= 1e-12 * scale, asym});

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    const double sigma_min = eig.eigenvalues()(0);
    items.push_back({"sensitivity positive definite (sigma_min)", sigma_min > 0.0, sigma_min});

    const Eigen::MatrixXd overlap = path_overlap_sensitivity(feeder.net, feeder.topo);
    const double overlap_err = (a - overlap).cwiseAbs().maxCoeff();
    items.push_back({"path-overlap construction agrees", overlap_err <= 1e-10, overlap_err});

    const double inv_err =
        (feeder.phi.dense * a - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    items.push_back({"weight is inverse of sensitivity", inv_err <= 1e-9, inv_err});

    Eigen::MatrixXd full(n + 1, n);
    full.row(0) = feeder.inc.m0.transpose();
    full.block(1, 0, n, n) = feeder.inc.M;
    const double col_sum = full.colwise().sum().cwiseAbs().maxCoeff();
    items.push_back({"incidence columns sum to zero", col_sum == 0.0, col_sum});

    const StepMetric seed = diag_dominant_seed(a);
    const PsdReport seed_report = verify_psd(seed, a);
    items.push_back({"seed metric feasible (min eig)", seed_report.psd, seed_report.min_eig});

    const PsdReport metric_report = verify_psd(feeder.metric, a);
    items.push_back(
        {"synthesized metric feasible (min eig)", metric_report.psd, metric_report.min_eig});

    return items;
}

}  // namespace vvcsim
