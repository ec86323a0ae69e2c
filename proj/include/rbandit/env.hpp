#pragma once

#include <Eigen/Dense>
#include <string_view>
#include <utility>

#include "rbandit/types.hpp"

namespace rbandit {

/// How contexts are generated.
///
/// uniform_box: every round, each arm's context is redrawn uniformly from
///   [-1, 1]^d and the mean reward is x'theta + v_i.
/// lowrank: each arm has a fixed true feature row and a noisy observed copy.
///   The agent only ever sees the observed row, while the mean reward is
///   u_user . v_true[i]. The gap u_user . (v_true[i] - v_obs[i]) acts as an
///   arm effect that is invisible to a purely linear model.
enum class ContextKind { uniform_box, lowrank };

ContextKind parse_context_kind(std::string_view text);
std::string_view to_string(ContextKind kind);

/// One sampled problem instance. Immutable after sampling.
///
/// Arms are indexed 0..K-1 throughout the library.
struct EnvironmentInstance {
    Eigen::VectorXd theta;  ///< shared parameter (u_user for lowrank)
    Eigen::VectorXd v;      ///< arm effects (implied offsets for lowrank)
    double sigma = 1.0;     ///< reward noise standard deviation
    ContextKind kind = ContextKind::uniform_box;

    // lowrank only
    Eigen::VectorXd u_user;
    Eigen::MatrixXd v_true;  ///< K x d
    Eigen::MatrixXd v_obs;   ///< K x d

    int num_arms() const { return static_cast<int>(v.size()); }
    int dim() const { return static_cast<int>(theta.size()); }

    /// Upper bound L on context norms: sqrt(d) for uniform_box, the largest
    /// observed row norm for lowrank.
    double context_bound() const;
};

/// Contexts of all arms in round t; row i is the context of arm i.
struct RoundContext {
    int t = 1;
    Eigen::MatrixXd contexts;
};

/// Samples theta ~ N(0, hp.lambda^-1 I_d), v_i ~ N(0, hp.sigma0_sq) and sets
/// sigma = sqrt(hp.sigma_sq).
///
/// For lowrank, u_user takes the role of theta, true feature rows are uniform
/// on [-1, 1]^d and the observed rows add N(0, lowrank_noise^2) to every
/// entry. A larger lowrank_noise plays the part of a smaller training set
/// for the feature estimates. hp.sigma0_sq is not used for lowrank; the arm
/// effects are the implied offsets u_user . (v_true[i] - v_obs[i]).
EnvironmentInstance sample_instance(int num_arms, int dim, const HyperParams& hp,
                                    ContextKind kind, Rng& rng, double lowrank_noise = 0.0);

RoundContext sample_contexts(const EnvironmentInstance& inst, int t, Rng& rng);

/// x'theta + v_arm, or u_user . v_true[arm] for lowrank (the observed
/// context does not enter the true mean there).
double mean_reward(const EnvironmentInstance& inst, int arm, const Eigen::Ref<const Eigen::VectorXd>& x);

double sample_reward(const EnvironmentInstance& inst, int arm, const Eigen::Ref<const Eigen::VectorXd>& x,
                     Rng& rng);

/// Optimal arm and its mean reward; ties go to the lowest index.
std::pair<int, double> best_arm(const EnvironmentInstance& inst, const RoundContext& ctx);

/// mu_star - mu_pulled, never negative.
double regret_increment(const EnvironmentInstance& inst, const RoundContext& ctx, int pulled);

}  // namespace rbandit
