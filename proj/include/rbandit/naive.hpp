#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "rbandit/estimator.hpp"
#include "rbandit/types.hpp"

namespace rbandit {

/// Posterior N(gamma, Sigma) of the stacked parameter theta (+) v.
struct AugmentedPosterior {
    Eigen::VectorXd gamma;
    Eigen::MatrixXd Sigma;
    Eigen::MatrixXd Sigma0;  ///< diag(lambda^-1 I_d, sigma0^2 I_K)
};

/// The same model written as one Bayesian linear regression over the
/// (d + K)-dimensional features z = x (+) e_i.
///
/// Keeps the full precision matrix Sigma0^-1 + sigma^-2 Z'Z and the vector
/// sigma^-2 Z'r, and factors the precision on demand. Every round therefore
/// costs O((d + K)^3); this class is the slow reference the efficient
/// estimator is checked and timed against.
///
/// Requires sigma0_sq > 0 so that the prior precision exists. The lazy
/// factorization makes even the reading members unsafe to call concurrently.
class AugmentedRegression {
public:
    AugmentedRegression(int num_arms, int dim, const HyperParams& hp);

    int num_arms() const { return num_arms_; }
    int dim() const { return dim_; }
    const HyperParams& params() const { return hp_; }

    /// x (+) e_arm.
    Eigen::VectorXd augment(const Eigen::Ref<const Eigen::VectorXd>& x, int arm) const;

    void update(const Eigen::Ref<const Eigen::VectorXd>& z, double r);
    void update(int arm, const Eigen::Ref<const Eigen::VectorXd>& x, double r) { update(augment(x, arm), r); }

    /// (z' gamma, z' Sigma z).
    std::pair<double, double> predict(const Eigen::Ref<const Eigen::VectorXd>& z) const;

    /// Mean and variance for every arm; row i of `contexts` belongs to arm i.
    /// One factorization and one blocked triangular solve against all K
    /// augmented features.
    std::vector<Prediction> predict_all(const Eigen::MatrixXd& contexts) const;

    /// Materializes gamma, Sigma and Sigma0.
    AugmentedPosterior posterior() const;

    const Eigen::MatrixXd& precision() const { return precision_; }

private:
    void refresh() const;

    int num_arms_;
    int dim_;
    HyperParams hp_;
    Eigen::MatrixXd precision_;
    Eigen::VectorXd cross_;

    mutable bool stale_ = true;
    mutable Eigen::LLT<Eigen::MatrixXd> factor_;
    mutable Eigen::VectorXd gamma_;
};

}  // namespace rbandit
