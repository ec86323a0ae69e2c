#include <doctest.h>

#include <cmath>

#include "rbandit/env.hpp"

using namespace rbandit;

namespace {

EnvironmentInstance fixed_instance(Eigen::VectorXd theta, Eigen::VectorXd v, double sigma = 1.0) {
    EnvironmentInstance inst;
    inst.theta = std::move(theta);
    inst.v = std::move(v);
    inst.sigma = sigma;
    return inst;
}

RoundContext zero_context(int K, int d) {
    RoundContext ctx;
    ctx.contexts = Eigen::MatrixXd::Zero(K, d);
    return ctx;
}

bool same(const EnvironmentInstance& a, const EnvironmentInstance& b) {
    return a.theta == b.theta && a.v == b.v && a.sigma == b.sigma && a.kind == b.kind && a.u_user == b.u_user &&
           a.v_true == b.v_true && a.v_obs == b.v_obs;
}

}  // namespace

TEST_SUITE("env") {

TEST_CASE("zero arm-effect variance gives zero effects") {
    Rng rng(7);
    const auto inst = sample_instance(3, 2, {1.0, 0.0, 1.0, 10}, ContextKind::uniform_box, rng);
    CHECK(inst.v == Eigen::VectorXd::Zero(3));
    CHECK(inst.theta.size() == 2);
}

TEST_CASE("sampling is deterministic under a seed") {
    for (ContextKind kind : {ContextKind::uniform_box, ContextKind::lowrank}) {
        Rng a(11), b(11);
        const HyperParams hp{1.0, 0.25, 1.0, 10};
        CHECK(same(sample_instance(5, 3, hp, kind, a, 0.3), sample_instance(5, 3, hp, kind, b, 0.3)));
    }
}

TEST_CASE("instance shape of the K = 50, d = 10 setup") {
    Rng rng(3);
    const auto inst = sample_instance(50, 10, {1.0, 0.0625, 1.0, 3000}, ContextKind::uniform_box, rng);
    CHECK(inst.num_arms() == 50);
    CHECK(inst.dim() == 10);
    CHECK(inst.sigma == 1.0);
    CHECK(inst.context_bound() == doctest::Approx(std::sqrt(10.0)));
    // Loose moment checks on the draws.
    const double v_var = inst.v.squaredNorm() / 50;
    CHECK(v_var > 0.02);
    CHECK(v_var < 0.15);
}

TEST_CASE("prior precision scales theta") {
    Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(1);
    const int reps = 20000;
    for (int s = 0; s < reps; ++s) {
        Rng rng(s);
        sum_sq += sample_instance(1, 1, {4.0, 0.0, 1.0, 1}, ContextKind::uniform_box, rng).theta.array().square().matrix();
    }
    CHECK(sum_sq[0] / reps == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("invalid dimensions are configuration errors") {
    Rng rng(1);
    CHECK_THROWS_AS(sample_instance(0, 2, {}, ContextKind::uniform_box, rng), ConfigError);
    CHECK_THROWS_AS(sample_instance(2, 0, {}, ContextKind::uniform_box, rng), ConfigError);
    CHECK_THROWS_AS(sample_instance(2, 2, {-1.0, 0.0, 1.0, 1}, ContextKind::uniform_box, rng), ConfigError);
    CHECK_NOTHROW(sample_instance(2, 2, {1.0, 0.0, 0.0, 1}, ContextKind::uniform_box, rng));
}

TEST_CASE("uniform_box contexts lie in the box and within sqrt(d)") {
    Rng rng(5);
    const auto inst = sample_instance(20, 4, {1.0, 0.25, 1.0, 10}, ContextKind::uniform_box, rng);
    for (int t = 1; t <= 50; ++t) {
        const auto ctx = sample_contexts(inst, t, rng);
        REQUIRE(ctx.contexts.rows() == 20);
        REQUIRE(ctx.contexts.cols() == 4);
        CHECK(ctx.contexts.cwiseAbs().maxCoeff() <= 1.0);
        CHECK(ctx.contexts.rowwise().norm().maxCoeff() <= inst.context_bound());
    }
}

TEST_CASE("contexts are deterministic under a seed") {
    Rng rng(5);
    const auto inst = sample_instance(4, 3, {1.0, 0.25, 1.0, 10}, ContextKind::uniform_box, rng);
    Rng a(99), b(99);
    CHECK(sample_contexts(inst, 3, a).contexts == sample_contexts(inst, 3, b).contexts);
}

TEST_CASE("lowrank contexts are the fixed observed features") {
    Rng rng(8);
    const auto inst = sample_instance(6, 3, {1.0, 0.0, 1.0, 10}, ContextKind::lowrank, rng, 0.4);
    const auto c1 = sample_contexts(inst, 1, rng);
    const auto c2 = sample_contexts(inst, 2, rng);
    CHECK(c1.contexts == c2.contexts);
    CHECK(c1.contexts == inst.v_obs);
    CHECK(c1.contexts.rowwise().norm().maxCoeff() <= inst.context_bound());
}

TEST_CASE("lowrank mean uses the true features") {
    Rng rng(8);
    const auto inst = sample_instance(6, 3, {1.0, 0.0, 1.0, 10}, ContextKind::lowrank, rng, 0.4);
    for (int i = 0; i < 6; ++i) {
        const Eigen::VectorXd truth = inst.v_true.row(i).transpose();
        const Eigen::VectorXd seen = inst.v_obs.row(i).transpose();
        CHECK(mean_reward(inst, i, truth) == doctest::Approx(inst.u_user.dot(truth)));
        CHECK(mean_reward(inst, i, seen) == doctest::Approx(inst.u_user.dot(truth)));
        // The implied offset closes the gap between the linear model on the
        // observed features and the true mean.
        CHECK(seen.dot(inst.theta) + inst.v[i] == doctest::Approx(inst.u_user.dot(truth)));
    }
}

TEST_CASE("lowrank without misspecification is exactly linear") {
    Rng rng(2);
    const auto inst = sample_instance(5, 2, {1.0, 0.0, 1.0, 10}, ContextKind::lowrank, rng, 0.0);
    CHECK(inst.v_obs == inst.v_true);
    CHECK(inst.v.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mean reward by substitution") {
    Eigen::VectorXd v(3);
    v << 0.0, 0.5, 0.0;
    const auto inst = fixed_instance(Eigen::Vector2d(1.0, 0.0), v);
    CHECK(mean_reward(inst, 1, Eigen::Vector2d(2.0, 3.0)) == 2.5);
    const auto flat = fixed_instance(Eigen::Vector2d::Zero(), Eigen::VectorXd::Zero(3));
    CHECK(mean_reward(flat, 2, Eigen::Vector2d(4.0, -1.0)) == 0.0);
    CHECK_THROWS_AS(mean_reward(inst, 3, Eigen::Vector2d::Zero()), std::out_of_range);
    CHECK_THROWS_AS(mean_reward(inst, -1, Eigen::Vector2d::Zero()), std::out_of_range);
}

TEST_CASE("zero arm-effect variance makes the environment linear") {
    Rng rng(4);
    const auto inst = sample_instance(7, 3, {1.0, 0.0, 1.0, 10}, ContextKind::uniform_box, rng);
    const auto ctx = sample_contexts(inst, 1, rng);
    for (int i = 0; i < 7; ++i) CHECK(mean_reward(inst, i, ctx.contexts.row(i).transpose()) == ctx.contexts.row(i).dot(inst.theta));
}

TEST_CASE("noiseless reward equals the mean") {
    const auto inst = fixed_instance(Eigen::Vector2d(1.0, -2.0), Eigen::Vector2d(0.3, 0.1), 0.0);
    Rng rng(1);
    const Eigen::Vector2d x(0.5, 0.25);
    CHECK(sample_reward(inst, 0, x, rng) == mean_reward(inst, 0, x));
}

TEST_CASE("reward noise has the right mean") {
    const auto inst = fixed_instance(Eigen::Vector2d(1.0, -2.0), Eigen::Vector2d(0.3, 0.1), 1.5);
    Rng rng(12);
    const Eigen::Vector2d x(0.5, 0.25);
    const int n = 100000;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += sample_reward(inst, 1, x, rng);
    CHECK(std::abs(sum / n - mean_reward(inst, 1, x)) <= 5 * 1.5 / std::sqrt(double(n)));
    Rng a(3), b(3);
    CHECK(sample_reward(inst, 0, x, a) == sample_reward(inst, 0, x, b));
}

TEST_CASE("best arm and ties") {
    Eigen::VectorXd v(3);
    v << 0.1, 0.3, 0.2;
    const auto inst = fixed_instance(Eigen::Vector2d::Zero(), v);
    const auto [arm, mu] = best_arm(inst, zero_context(3, 2));
    CHECK(arm == 1);
    CHECK(mu == 0.3);

    const auto tied = fixed_instance(Eigen::Vector2d::Zero(), Eigen::VectorXd::Constant(4, 0.7));
    CHECK(best_arm(tied, zero_context(4, 2)).first == 0);

    const auto single = fixed_instance(Eigen::Vector2d(1.0, 1.0), Eigen::VectorXd::Constant(1, -3.0));
    Rng rng(1);
    CHECK(best_arm(single, sample_contexts(single, 1, rng)).first == 0);
}

TEST_CASE("regret increments") {
    Eigen::VectorXd v(2);
    v << 0.1, 0.3;
    const auto inst = fixed_instance(Eigen::Vector2d::Zero(), v);
    CHECK(regret_increment(inst, zero_context(2, 2), 0) == doctest::Approx(0.2));
    CHECK(regret_increment(inst, zero_context(2, 2), 1) == 0.0);

    Rng rng(21);
    const auto random = sample_instance(9, 4, {1.0, 0.5, 1.0, 10}, ContextKind::uniform_box, rng);
    for (int t = 1; t <= 30; ++t) {
        const auto ctx = sample_contexts(random, t, rng);
        for (int i = 0; i < 9; ++i) CHECK(regret_increment(random, ctx, i) >= 0.0);
        CHECK(regret_increment(random, ctx, best_arm(random, ctx).first) == 0.0);
    }
}

TEST_CASE("context kind names round-trip") {
    CHECK(parse_context_kind(to_string(ContextKind::lowrank)) == ContextKind::lowrank);
    CHECK(parse_context_kind(to_string(ContextKind::uniform_box)) == ContextKind::uniform_box);
    CHECK_THROWS_AS(parse_context_kind("sphere"), ConfigError);
}

}
