#include "rbandit/env.hpp"

#include <cmath>
#include <string>

namespace rbandit {

namespace {

void check_arm(const EnvironmentInstance& inst, int arm) {
    if (arm < 0 || arm >= inst.num_arms())
        throw std::out_of_range("arm index " + std::to_string(arm) + " out of range");
}

}  // namespace

ContextKind parse_context_kind(std::string_view text) {
    if (text == "uniform_box") return ContextKind::uniform_box;
    if (text == "lowrank") return ContextKind::lowrank;
    throw ConfigError("unknown context kind: " + std::string(text));
}

std::string_view to_string(ContextKind kind) {
    return kind == ContextKind::lowrank ? "lowrank" : "uniform_box";
}

double EnvironmentInstance::context_bound() const {
    if (kind == ContextKind::lowrank) return v_obs.rowwise().norm().maxCoeff();
    return std::sqrt(static_cast<double>(dim()));
}

EnvironmentInstance sample_instance(int num_arms, int dim, const HyperParams& hp,
                                    ContextKind kind, Rng& rng, double lowrank_noise) {
    if (num_arms < 1 || dim < 1) throw ConfigError("need K >= 1 and d >= 1");
    if (!(hp.lambda > 0.0) || !std::isfinite(hp.lambda)) throw ConfigError("lambda must be positive");
    if (!(hp.sigma0_sq >= 0.0) || !(hp.sigma_sq >= 0.0) || !std::isfinite(hp.sigma0_sq) || !std::isfinite(hp.sigma_sq))
        throw ConfigError("variances must be finite and nonnegative");
    if (!(lowrank_noise >= 0.0)) throw ConfigError("lowrank_noise must be nonnegative");

    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> box(-1.0, 1.0);

    EnvironmentInstance inst;
    inst.kind = kind;
    inst.sigma = std::sqrt(hp.sigma_sq);

    const double theta_sd = 1.0 / std::sqrt(hp.lambda);
    inst.theta.resize(dim);
    for (int j = 0; j < dim; ++j) inst.theta[j] = theta_sd * normal(rng);

    inst.v.resize(num_arms);
    if (kind == ContextKind::uniform_box) {
        const double v_sd = std::sqrt(hp.sigma0_sq);
        for (int i = 0; i < num_arms; ++i) inst.v[i] = v_sd * normal(rng);
        return inst;
    }

    inst.u_user = inst.theta;
    inst.v_true.resize(num_arms, dim);
    inst.v_obs.resize(num_arms, dim);
    for (int i = 0; i < num_arms; ++i)
        for (int j = 0; j < dim; ++j) inst.v_true(i, j) = box(rng);
    for (int i = 0; i < num_arms; ++i)
        for (int j = 0; j < dim; ++j) inst.v_obs(i, j) = inst.v_true(i, j) + lowrank_noise * normal(rng);
    inst.v = (inst.v_true - inst.v_obs) * inst.u_user;
    return inst;
}

RoundContext sample_contexts(const EnvironmentInstance& inst, int t, Rng& rng) {
    RoundContext ctx;
    ctx.t = t;
    if (inst.kind == ContextKind::lowrank) {
        ctx.contexts = inst.v_obs;
        return ctx;
    }
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    const int K = inst.num_arms();
    const int d = inst.dim();
    ctx.contexts.resize(K, d);
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < d; ++j) ctx.contexts(i, j) = box(rng);
    return ctx;
}

double mean_reward(const EnvironmentInstance& inst, int arm, const Eigen::Ref<const Eigen::VectorXd>& x) {
    check_arm(inst, arm);
    if (inst.kind == ContextKind::lowrank) return inst.v_true.row(arm).dot(inst.u_user);
    if (x.size() != inst.dim()) throw std::invalid_argument("context has wrong dimension");
    return x.dot(inst.theta) + inst.v[arm];
}

double sample_reward(const EnvironmentInstance& inst, int arm, const Eigen::Ref<const Eigen::VectorXd>& x,
                     Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double mu = mean_reward(inst, arm, x);
    const double noise = normal(rng);
    if (inst.sigma == 0.0) return mu;
    return mu + inst.sigma * noise;
}

std::pair<int, double> best_arm(const EnvironmentInstance& inst, const RoundContext& ctx) {
    int best = 0;
    double best_mu = mean_reward(inst, 0, ctx.contexts.row(0).transpose());
    for (int i = 1; i < inst.num_arms(); ++i) {
        const double mu = mean_reward(inst, i, ctx.contexts.row(i).transpose());
        if (mu > best_mu) {
            best = i;
            best_mu = mu;
        }
    }
    return {best, best_mu};
}

double regret_increment(const EnvironmentInstance& inst, const RoundContext& ctx, int pulled) {
    const double mu_star = best_arm(inst, ctx).second;
    const double mu = mean_reward(inst, pulled, ctx.contexts.row(pulled).transpose());
    return mu_star - mu;
}

}  // namespace rbandit
