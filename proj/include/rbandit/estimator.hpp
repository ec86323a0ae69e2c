#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rbandit/types.hpp"

namespace rbandit {

/// Sufficient statistics of the pulls of one arm.
///
/// All fields are exact running sums, so the order of updates only matters up
/// to floating-point reassociation. Means are derived on demand.
struct ArmStats {
    int count = 0;
    Eigen::VectorXd sum_x;  ///< sum of contexts
    double sum_r = 0.0;     ///< sum of rewards
    double sum_r_sq = 0.0;  ///< sum of squared rewards (only map_loss needs it)
    Eigen::MatrixXd gram;   ///< sum of x x'
    Eigen::VectorXd xr;     ///< sum of x r

    explicit ArmStats(int dim = 0);

    /// Zero vector when the arm was never pulled.
    Eigen::VectorXd mean_x() const;
    /// Zero when the arm was never pulled.
    double mean_r() const;
};

/// Precision M_t of the shared parameter and its MAP estimate, together with
/// the Cholesky factor of M_t so predictions can reuse it.
struct SharedPosterior {
    Eigen::MatrixXd M;
    Eigen::VectorXd theta_hat;
    Eigen::LLT<Eigen::MatrixXd> factor;
};

/// Posterior mean and variance of one arm's mean reward.
struct Prediction {
    double mu_hat = 0.0;
    double tau_sq = 0.0;
};

/// Joint MAP estimator of the shared parameter theta and the arm effects v_i.
///
/// Per-arm statistics are accumulated by update(). Each round, recompute()
/// rebuilds
///
///   M         = lambda I + sigma^-2 sum_i (G_i - w_i n_i xbar_i xbar_i')
///   theta_hat = M^-1 sigma^-2 sum_i (X_i'r_i - w_i n_i xbar_i rbar_i)
///
/// with w_i = sigma0^2 / (sigma0^2 + sigma^2 / n_i), in O(d^2 K + d^3). The
/// weights change whenever an arm is pulled, so M is rebuilt from the
/// accumulators instead of being updated in place.
///
/// predict() then gives
///
///   mu_hat = w rbar + (x - w xbar)' theta_hat
///   tau^2  = sigma0^2 (1 - w) + (x - w xbar)' M^-1 (x - w xbar)
///
/// which are the exact posterior mean and variance of x'theta + v_i under
/// Gaussian priors and noise.
///
/// One writer at a time; const members are safe to call concurrently.
class RobustEstimator {
public:
    RobustEstimator(int num_arms, int dim, const HyperParams& hp);

    int num_arms() const { return static_cast<int>(arms_.size()); }
    int dim() const { return dim_; }
    const HyperParams& params() const { return hp_; }

    /// Replaces the hyper-parameters. The statistics do not depend on them,
    /// so the history is kept.
    void set_params(const HyperParams& hp);

    const ArmStats& stats(int arm) const;

    /// sigma0^2 / (sigma0^2 + sigma^2 / n_i); 0 for unpulled arms or sigma0^2 = 0.
    double weight(int arm) const;

    void update(int arm, const Eigen::Ref<const Eigen::VectorXd>& x, double r);

    /// Throws NumericalError if M is not positive definite, which cannot
    /// happen for valid hyper-parameters since M >= lambda I.
    SharedPosterior recompute() const;

    Prediction predict(int arm, const Eigen::Ref<const Eigen::VectorXd>& x, const SharedPosterior& sp) const;

    /// predict() for every arm, row i of `contexts` being arm i's context.
    std::vector<Prediction> predict_all(const Eigen::MatrixXd& contexts, const SharedPosterior& sp) const;

    /// MAP arm effect w (rbar - xbar' theta_hat); 0 for unpulled arms.
    double map_v(int arm, const SharedPosterior& sp) const;

    /// Penalized loss
    ///
    ///   sum_i [sigma^-2 ||r_i - X_i theta - v_i 1||^2 + sigma0^-2 v_i^2] + lambda ||theta||^2
    ///
    /// evaluated on the accumulated history. Undefined for sigma0^2 = 0, in
    /// which case std::domain_error is thrown.
    double map_loss(const Eigen::Ref<const Eigen::VectorXd>& v, const Eigen::Ref<const Eigen::VectorXd>& theta) const;

private:
    void check_arm(int arm) const;

    int dim_;
    HyperParams hp_;
    std::vector<ArmStats> arms_;
};

}  // namespace rbandit
