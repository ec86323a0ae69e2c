#include "rbandit/hyperparam.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace rbandit {

namespace {

struct ArmData {
    Eigen::MatrixXd X;
    Eigen::VectorXd r;
};

std::vector<ArmData> group_by_arm(std::span<const Observation> history, int num_arms, int dim) {
    if (num_arms < 1 || dim < 1) throw ConfigError("need K >= 1 and d >= 1");
    std::vector<int> counts(num_arms, 0);
    for (const Observation& obs : history) {
        if (obs.arm < 0 || obs.arm >= num_arms) throw std::out_of_range("arm index " + std::to_string(obs.arm));
        if (obs.x.size() != dim) throw std::invalid_argument("context has wrong dimension");
        ++counts[obs.arm];
    }
    std::vector<ArmData> arms(num_arms);
    for (int i = 0; i < num_arms; ++i) {
        arms[i].X.resize(counts[i], dim);
        arms[i].r.resize(counts[i]);
    }
    std::fill(counts.begin(), counts.end(), 0);
    for (const Observation& obs : history) {
        const int row = counts[obs.arm]++;
        arms[obs.arm].X.row(row) = obs.x.transpose();
        arms[obs.arm].r[row] = obs.r;
    }
    return arms;
}

struct WithinFit {
    double rss = 0.0;
    int dof = 0;
};

WithinFit within_arm_fit(const std::vector<ArmData>& arms, int dim) {
    WithinFit fit;
    for (const ArmData& a : arms) {
        const Eigen::Index n = a.r.size();
        if (n < dim + 2) continue;
        const Eigen::MatrixXd Xc = a.X.rowwise() - a.X.colwise().mean();
        const Eigen::VectorXd rc = a.r.array() - a.r.mean();
        const Eigen::VectorXd beta = Xc.completeOrthogonalDecomposition().solve(rc);
        fit.rss += (rc - Xc * beta).squaredNorm();
        fit.dof += static_cast<int>(n) - dim;
    }
    if (fit.dof == 0) throw InsufficientDataError("no arm has at least d + 2 pulls");
    return fit;
}

struct PooledFit {
    double rss = 0.0;
    double d0 = 0.0;
    double raw = 0.0;
};

PooledFit pooled_fit(const std::vector<ArmData>& arms, int dim, double sigma_sq_hat) {
    Eigen::Index total = 0;
    for (const ArmData& a : arms) total += a.r.size();
    if (total <= dim) throw InsufficientDataError("pooled regression needs more than d observations");

    Eigen::MatrixXd X(total, dim);
    Eigen::VectorXd r(total);
    Eigen::Index row = 0;
    for (const ArmData& a : arms) {
        X.middleRows(row, a.r.size()) = a.X;
        r.segment(row, a.r.size()) = a.r;
        row += a.r.size();
    }

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < dim) throw InsufficientDataError("pooled Gram matrix is singular");

    PooledFit fit;
    fit.rss = (r - X * qr.solve(r)).squaredNorm();

    // d0 = sum_i s_i' G^-1 s_i with s_i = n_i xbar_i
    const Eigen::LLT<Eigen::MatrixXd> gram(X.transpose() * X);
    if (gram.info() != Eigen::Success) throw InsufficientDataError("pooled Gram matrix is singular");
    for (const ArmData& a : arms) {
        if (a.r.size() == 0) continue;
        const Eigen::VectorXd s = a.X.colwise().sum().transpose();
        fit.d0 += gram.matrixL().solve(s).squaredNorm();
    }

    const double n_t = static_cast<double>(total);
    fit.raw = (fit.rss - (n_t - dim) * sigma_sq_hat) / (n_t - fit.d0);
    return fit;
}

}  // namespace

double estimate_sigma_sq(std::span<const Observation> history, int num_arms, int dim) {
    const WithinFit fit = within_arm_fit(group_by_arm(history, num_arms, dim), dim);
    return fit.rss / fit.dof;
}

double estimate_sigma0_sq(std::span<const Observation> history, int num_arms, int dim, double sigma_sq_hat) {
    const PooledFit fit = pooled_fit(group_by_arm(history, num_arms, dim), dim, sigma_sq_hat);
    return std::max(fit.raw, 0.0);
}

MomentEstimates estimate_moments(std::span<const Observation> history, int num_arms, int dim) {
    const auto arms = group_by_arm(history, num_arms, dim);
    const WithinFit within = within_arm_fit(arms, dim);
    MomentEstimates est;
    est.sigma_sq_hat = within.rss / within.dof;
    est.dof_used = within.dof;
    const PooledFit pooled = pooled_fit(arms, dim, est.sigma_sq_hat);
    est.d0 = pooled.d0;
    est.sigma0_sq_raw = pooled.raw;
    est.sigma0_sq_hat = std::max(pooled.raw, 0.0);
    return est;
}

}  // namespace rbandit
