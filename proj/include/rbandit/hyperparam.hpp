#pragma once

#include <Eigen/Dense>
#include <span>

#include "rbandit/types.hpp"

namespace rbandit {

/// One logged pull.
struct Observation {
    int arm = 0;
    Eigen::VectorXd x;
    double r = 0.0;
};

/// Method-of-moments estimates of the noise and arm-effect variances.
struct MomentEstimates {
    double sigma_sq_hat = 0.0;
    double sigma0_sq_hat = 0.0;     ///< max(raw, 0)
    double sigma0_sq_raw = 0.0;     ///< before clamping; may be negative
    double lambda_fixed = 0.01;     ///< lambda is not estimated
    int dof_used = 0;               ///< sum over qualifying arms of n_i - d
    double d0 = 0.0;                ///< trace((sum X'X)^-1 sum n_i^2 xbar xbar')
};

/// Noise variance from within-arm regressions.
///
/// For every arm with n_i >= d + 2, the centered rewards r - rbar_i are
/// regressed on the centered contexts x - xbar_i by least squares
/// (minimum-norm solution when rank deficient). The residual sum of squares
/// over those arms is divided by sum_i (n_i - d). Other arms are ignored.
///
/// Throws InsufficientDataError when no arm qualifies.
double estimate_sigma_sq(std::span<const Observation> history, int num_arms, int dim);

/// Arm-effect variance from the pooled regression of r on x (no intercept):
///
///   raw = (n_t - d0)^-1 [ sum s^2 - (n_t - d) sigma_sq_hat ]
///
/// where s are the pooled residuals, n_t the number of observations and
/// d0 = trace((sum_i X_i'X_i)^-1 sum_i n_i^2 xbar_i xbar_i'). Returns max(raw, 0).
///
/// Throws InsufficientDataError when the pooled Gram matrix is singular.
double estimate_sigma0_sq(std::span<const Observation> history, int num_arms, int dim, double sigma_sq_hat);

/// Both estimates plus the diagnostics behind them.
MomentEstimates estimate_moments(std::span<const Observation> history, int num_arms, int dim);

}  // namespace rbandit
