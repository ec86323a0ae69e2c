#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rbandit/estimator.hpp"
#include "rbandit/types.hpp"

namespace rbandit {

enum class PolicyKind { rolin_ucb, rolin_ts, lin_ts, bayes_lin_ucb };

PolicyKind parse_policy_kind(std::string_view text);
std::string_view to_string(PolicyKind kind);

/// An arm-selection rule and the arm-effect variance s0^2 it assumes.
///
/// s0_sq is the algorithm's belief, decoupled from the environment's
/// sigma0^2. lin_ts always runs with s0_sq = 0. For bayes_lin_ucb, delta <= 0
/// means 1/n; `finite_arms` selects the width sqrt(2 log(1/delta)) and
/// otherwise sqrt(2 p log(1/delta)) with p = d + K parameters.
struct PolicySpec {
    PolicyKind kind = PolicyKind::rolin_ts;
    double s0_sq = 0.0;
    double delta = 0.0;
    bool finite_arms = true;

    /// The s0^2 the estimator should run with.
    double effective_s0_sq() const { return kind == PolicyKind::lin_ts ? 0.0 : s0_sq; }

    /// Text form accepted by parse(), e.g. "rolin_ts:0.25".
    std::string label() const;

    /// Parses "kind[:s0_sq[:delta[:finite|general]]]".
    static PolicySpec parse(std::string_view text);
};

/// mu_hat + sqrt(2 tau^2 ln n). Throws ConfigError for horizon < 2.
double ucb_index(double mu_hat, double tau_sq, int horizon);

/// One draw from N(mu_hat, tau^2). Always consumes exactly one normal
/// variate, so streams stay aligned when tau^2 = 0.
double ts_sample(double mu_hat, double tau_sq, Rng& rng);

/// Index of the largest value; ties go to the lowest index.
int select_arm(std::span<const double> indices);

/// mean + alpha sd with alpha = sqrt(2 log(1/delta)) for finitely many arms
/// and sqrt(2 dim log(1/delta)) otherwise.
double bayes_linucb_index(double mean, double sd, double delta, bool finite_arms, int dim);

/// Arm chosen by `spec` given every arm's prediction. `horizon` feeds the UCB
/// widths and `num_params` (= d + K) the general Bayesian UCB width.
int choose_arm(const PolicySpec& spec, std::span<const Prediction> predictions, int horizon, int num_params,
               Rng& rng);

}  // namespace rbandit
