#include "vvcsim/synthesis.hpp"

#include "simplex.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace vvcsim {

namespace {

Eigen::MatrixXd cholesky_upper(const Eigen::MatrixXd& phi) {
    const Eigen::LLT<Eigen::MatrixXd> llt(phi);
    if (llt.info() != Eigen::Success) numerical_error("weight matrix is not positive definite");
    return Eigen::MatrixXd(llt.matrixL()).transpose();
}

double spectral_norm_sym(const Eigen::MatrixXd& s) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s)
        .eigenvalues()
        .cwiseAbs()
        .maxCoeff();
}

}  // namespace

ObjectiveWeight phi_from_A(const NetworkCase& net, const IncidenceDecomposition& inc) {
    const int n = net.bus_count;
    Eigen::VectorXd x_inv(n);
    for (int j = 0; j < n; ++j) x_inv(j) = 1.0 / net.lines[j].x;

    ObjectiveWeight phi;
    phi.exact_inverse_of_A = true;
    phi.dense = inc.M * x_inv.asDiagonal() * inc.M.transpose();
    phi.dense = 0.5 * (phi.dense + phi.dense.transpose()).eval();
    phi.E = cholesky_upper(phi.dense);
    phi.e_norm = std::sqrt(spectral_norm_sym(phi.dense));
    return phi;
}

ObjectiveWeight weight_from_matrix(Eigen::MatrixXd mat) {
    ObjectiveWeight phi;
    phi.exact_inverse_of_A = false;
    phi.dense = std::move(mat);
    if (phi.dense.rows() != phi.dense.cols()) input_error("weight matrix must be square");
    if (!phi.dense.isApprox(phi.dense.transpose(), 1e-12))
        input_error("weight matrix must be symmetric");
    phi.E = cholesky_upper(phi.dense);
    phi.e_norm = std::sqrt(spectral_norm_sym(phi.dense));
    return phi;
}

StepMetric diag_dominant_seed(const Eigen::MatrixXd& a) {
    StepMetric metric;
    metric.d = a.cwiseAbs().rowwise().sum();
    metric.provenance = MetricProvenance::seed;
    return metric;
}

std::pair<double, Eigen::VectorXd> smallest_eigenpair_sym(const Eigen::MatrixXd& s) {
    const int n = static_cast<int>(s.rows());
    // Gershgorin lower bound gives a shift that makes s - sigma I PD.
    const double bound = s.cwiseAbs().rowwise().sum().maxCoeff();
    const double sigma = -bound - 1e-12 - 1e-6 * bound;
    const Eigen::LLT<Eigen::MatrixXd> llt(
        (s - sigma * Eigen::MatrixXd::Identity(n, n)).eval());
    if (llt.info() != Eigen::Success) numerical_error("shifted inverse iteration setup failed");

    // Deterministic pseudo-random start; a fixed pattern could sit orthogonal
    // to the target eigenvector on symmetric feeders.
    Eigen::VectorXd v(n);
    std::uint64_t state = 0x9e3779b97f4a7c15ULL;
    for (int i = 0; i < n; ++i) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        v(i) = double(state >> 11) * 0x1p-53 - 0.5;
    }
    v.normalize();

    double rayleigh = v.dot(s * v);
    for (int it = 0; it < 600; ++it) {
        Eigen::VectorXd y = llt.solve(v);
        y.normalize();
        const double next = y.dot(s * y);
        const bool settled = std::abs(next - rayleigh) <= 1e-13 * (std::abs(next) + bound);
        rayleigh = next;
        v = y;
        if (settled && it > 3) break;
    }
    return {rayleigh, v};
}

StepMetric solve_trace_min_metric(const Eigen::MatrixXd& a, const TraceMinOptions& opts) {
    const int n = static_cast<int>(a.rows());
    if (!a.isApprox(a.transpose(), 1e-10)) input_error("sensitivity matrix must be symmetric");
    const double norm_a = spectral_norm_sym(a);
    const double tol = opts.tol_rel * norm_a;
    const Eigen::VectorXd lb = a.diagonal();

    Eigen::VectorXd ell = lb;
    std::vector<Eigen::VectorXd> cut_coeffs;
    std::vector<double> cut_rhs;
    const int budget = opts.max_cuts_per_bus * n;

    for (int iter = 0; iter < budget; ++iter) {
        Eigen::MatrixXd slack = -a;
        slack.diagonal() += ell;
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(slack);
        if (eig.info() != Eigen::Success) numerical_error("eigen solve failed in metric synthesis");
        const double lam = eig.eigenvalues()(0);
        if (lam >= -tol) break;
        const Eigen::VectorXd v = eig.eigenvectors().col(0);
        cut_coeffs.push_back(v.cwiseProduct(v));
        cut_rhs.push_back(v.dot(a * v));

        // LP over u = L - lb: keep only rows not already implied by L >= lb.
        std::vector<int> active;
        for (std::size_t j = 0; j < cut_rhs.size(); ++j)
            if (cut_rhs[j] - cut_coeffs[j].dot(lb) > 0.0) active.push_back(static_cast<int>(j));
        if (!active.empty()) {
            Eigen::MatrixXd c(active.size(), n);
            Eigen::VectorXd b(active.size());
            for (std::size_t row = 0; row < active.size(); ++row) {
                c.row(row) = cut_coeffs[active[row]].transpose();
                b(row) = cut_rhs[active[row]] - cut_coeffs[active[row]].dot(lb);
            }
            ell = lb + detail::solve_covering_lp(c, b);
        }
    }

    // Exact feasibility: scale by the top eigenvalue of D^-1/2 A D^-1/2.
    Eigen::MatrixXd scaled = a;
    const Eigen::VectorXd root = ell.cwiseSqrt();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scaled(i, j) /= root(i) * root(j);
    const double s = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(scaled)
                         .eigenvalues()
                         .maxCoeff();
    if (s > 1.0) ell *= s * (1.0 + 4.0 * std::numeric_limits<double>::epsilon());

    StepMetric metric{ell, MetricProvenance::optimized};

    // The seed is always feasible; never return anything with a larger trace.
    const StepMetric seed = diag_dominant_seed(a);
    if (metric.d.sum() > seed.d.sum()) metric.d = seed.d;

    if (!verify_psd(metric, a).psd)
        numerical_error("metric synthesis could not certify feasibility");
    return metric;
}

PsdReport verify_psd(const StepMetric& metric, const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    if (metric.d.size() != n) input_error("metric length mismatch");
    PsdReport report;
    report.eps = 1e-9 * spectral_norm_sym(a);

    Eigen::MatrixXd slack = -a;
    slack.diagonal() += metric.d;
    Eigen::MatrixXd shifted = slack;
    shifted.diagonal().array() += report.eps;
    const Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    report.psd = llt.info() == Eigen::Success;
    report.min_eig = smallest_eigenpair_sym(slack).first;
    return report;
}

}  // namespace vvcsim
