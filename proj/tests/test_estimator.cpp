#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "rbandit/estimator.hpp"

using namespace rbandit;

namespace {

RobustEstimator feed(const std::vector<Observation>& h, int K, int d, const HyperParams& hp) {
    RobustEstimator est(K, d, hp);
    for (const Observation& o : h) est.update(o.arm, o.x, o.r);
    return est;
}

Eigen::VectorXd one(double x) { return Eigen::VectorXd::Constant(1, x); }

}  // namespace

TEST_SUITE("estimator") {

TEST_CASE("weight") {
    RobustEstimator est(2, 1, {1.0, 1.0, 1.0, 10});
    CHECK(est.weight(0) == 0.0);
    est.update(0, one(1.0), 0.0);
    CHECK(est.weight(0) == 0.5);
    CHECK_THROWS_AS(est.weight(2), std::out_of_range);

    RobustEstimator flat(2, 1, {1.0, 0.0, 1.0, 10});
    for (int k = 0; k < 5; ++k) flat.update(0, one(1.0), 0.0);
    CHECK(flat.weight(0) == 0.0);

    RobustEstimator grow(1, 1, {1.0, 0.3, 2.0, 10});
    double prev = grow.weight(0);
    for (int k = 0; k < 200; ++k) {
        grow.update(0, one(0.5), 1.0);
        const double w = grow.weight(0);
        CHECK(w >= prev);
        CHECK(w >= 0.0);
        CHECK(w < 1.0);
        prev = w;
    }
}

TEST_CASE("update accumulates only the pulled arm") {
    RobustEstimator est(3, 2, {1.0, 0.5, 1.0, 10});
    const Eigen::Vector2d x(0.5, -1.0);
    est.update(0, x, 2.0);
    CHECK(est.stats(0).count == 1);
    CHECK(est.stats(0).mean_x() == x);
    CHECK(est.stats(0).mean_r() == 2.0);
    CHECK(est.stats(0).gram.isApprox(x * x.transpose()));
    CHECK(est.stats(0).xr == 2.0 * x);
    CHECK(est.stats(1).count == 0);
    CHECK(est.stats(1).sum_x.isZero());
    CHECK(est.stats(1).gram.isZero());
    CHECK(est.stats(1).mean_r() == 0.0);
    CHECK_THROWS_AS(est.update(0, Eigen::VectorXd::Zero(3), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(est.update(3, x, 1.0), std::out_of_range);

    RobustEstimator a(2, 2, {}), b(2, 2, {});
    const Eigen::Vector2d y(0.25, 0.75);
    a.update(1, x, 1.0);
    a.update(1, y, -1.0);
    b.update(1, y, -1.0);
    b.update(1, x, 1.0);
    CHECK(a.stats(1).sum_x == b.stats(1).sum_x);
    CHECK(a.stats(1).gram == b.stats(1).gram);
    CHECK(a.stats(1).xr == b.stats(1).xr);
}

TEST_CASE("empty history") {
    const HyperParams hp{2.0, 0.5, 1.0, 10};
    RobustEstimator est(3, 2, hp);
    const SharedPosterior sp = est.recompute();
    CHECK(sp.M.isApprox(2.0 * Eigen::MatrixXd::Identity(2, 2)));
    CHECK(sp.theta_hat.isZero());
    const Eigen::Vector2d x(0.5, -1.0);
    const Prediction p = est.predict(1, x, sp);
    CHECK(p.mu_hat == 0.0);
    CHECK(p.tau_sq == doctest::Approx(0.5 + x.squaredNorm() / 2.0));
    CHECK(est.map_v(0, sp) == 0.0);
    CHECK(est.map_loss(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2)) == 0.0);
}

TEST_CASE("one arm, one dimension, one pull") {
    RobustEstimator est(1, 1, {1.0, 1.0, 1.0, 10});
    est.update(0, one(1.0), 1.0);
    CHECK(est.weight(0) == 0.5);
    const SharedPosterior sp = est.recompute();
    CHECK(sp.M(0, 0) == doctest::Approx(1.5));
    CHECK(sp.theta_hat[0] == doctest::Approx(1.0 / 3.0));
    const Prediction p = est.predict(0, one(1.0), sp);
    CHECK(p.mu_hat == doctest::Approx(2.0 / 3.0));
    CHECK(p.tau_sq == doctest::Approx(2.0 / 3.0));
    CHECK(est.map_v(0, sp) == doctest::Approx(1.0 / 3.0));

    // The 2x2 joint problem [[2, 1], [1, 2]] gamma = (1, 1) by hand.
    const std::vector<Observation> h{{0, one(1.0), 1.0}};
    const auto joint = oracle::joint_solve(h, 1, 1, est.params());
    CHECK(joint.gamma[0] == doctest::Approx(1.0 / 3.0));
    CHECK(joint.gamma[1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("matches the joint posterior on random histories") {
    std::mt19937_64 rng(2024);
    for (int rep = 0; rep < 100; ++rep) {
        const int K = 2 + rep % 7, d = 1 + rep % 4;
        const HyperParams hp{oracle::log_uniform(rng, 0.1, 10), oracle::log_uniform(rng, 0.1, 10),
                             oracle::log_uniform(rng, 0.1, 10), 100};
        const auto h = oracle::random_history(rng, K, d, 1 + rep % 50);
        const RobustEstimator est = feed(h, K, d, hp);
        const SharedPosterior sp = est.recompute();
        const auto joint = oracle::joint_solve(h, K, d, hp);

        CHECK((sp.theta_hat - joint.gamma.head(d)).norm() <= 1e-9 * (1.0 + joint.gamma.norm()));
        std::uniform_real_distribution<double> box(-1.0, 1.0);
        for (int i = 0; i < K; ++i) {
            CHECK(std::abs(est.map_v(i, sp) - joint.gamma[d + i]) <= 1e-9 * (1.0 + joint.gamma.norm()));
            Eigen::VectorXd z = Eigen::VectorXd::Zero(d + K);
            for (int j = 0; j < d; ++j) z[j] = box(rng);
            z[d + i] = 1.0;
            const Prediction p = est.predict(i, z.head(d), sp);
            CHECK(oracle::rel_diff(p.tau_sq, z.dot(joint.cov * z)) <= 1e-9);
            CHECK(std::abs(p.mu_hat - z.dot(joint.gamma)) <= 1e-9 * (1.0 + std::abs(p.mu_hat)));
        }
    }
}

TEST_CASE("zero arm-effect variance reduces to ridge regression") {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 30; ++rep) {
        const int K = 3 + rep % 4, d = 1 + rep % 4;
        const HyperParams hp{oracle::log_uniform(rng, 0.1, 10), 0.0, oracle::log_uniform(rng, 0.1, 10), 100};
        const auto h = oracle::random_history(rng, K, d, 40);
        const RobustEstimator est = feed(h, K, d, hp);
        const SharedPosterior sp = est.recompute();
        const auto ridge = oracle::ridge(h, d, hp);
        CHECK((sp.theta_hat - ridge.gamma).norm() <= 1e-10 * (1.0 + ridge.gamma.norm()));
        const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(d, -0.5, 0.9);
        for (int i = 0; i < K; ++i) {
            const Prediction p = est.predict(i, x, sp);
            CHECK(p.mu_hat == doctest::Approx(x.dot(ridge.gamma)).epsilon(1e-10));
            CHECK(p.tau_sq == doctest::Approx(x.dot(ridge.cov * x)).epsilon(1e-10));
            CHECK(est.map_v(i, sp) == 0.0);
        }
        CHECK_THROWS_AS(est.map_loss(Eigen::VectorXd::Zero(K), sp.theta_hat), std::domain_error);
    }
}

TEST_CASE("update order does not matter") {
    std::mt19937_64 rng(5);
    const int K = 6, d = 3;
    const HyperParams hp{0.7, 0.4, 1.3, 100};
    auto h = oracle::random_history(rng, K, d, 60);
    const RobustEstimator a = feed(h, K, d, hp);
    std::shuffle(h.begin(), h.end(), rng);
    const RobustEstimator b = feed(h, K, d, hp);
    const auto rel = [](const auto& x, const auto& y) { return (x - y).norm() / std::max(1.0, x.norm()); };
    for (int i = 0; i < K; ++i) {
        CHECK(a.stats(i).count == b.stats(i).count);
        CHECK(rel(a.stats(i).sum_x, b.stats(i).sum_x) <= 1e-12);
        CHECK(rel(a.stats(i).gram, b.stats(i).gram) <= 1e-12);
        CHECK(rel(a.stats(i).xr, b.stats(i).xr) <= 1e-12);
        CHECK(oracle::rel_diff(a.stats(i).sum_r, b.stats(i).sum_r) <= 1e-12);
    }
    const SharedPosterior spa = a.recompute(), spb = b.recompute();
    const Eigen::Vector3d x(0.3, -0.2, 0.9);
    for (int i = 0; i < K; ++i) {
        CHECK(std::abs(a.predict(i, x, spa).mu_hat - b.predict(i, x, spb).mu_hat) <= 1e-10);
        CHECK(std::abs(a.predict(i, x, spa).tau_sq - b.predict(i, x, spb).tau_sq) <= 1e-10);
    }
}

TEST_CASE("precision dominates lambda and variances stay bounded") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        const int K = 2 + rep % 6, d = 1 + rep % 4;
        const HyperParams hp{oracle::log_uniform(rng, 0.1, 10), oracle::log_uniform(rng, 0.1, 10),
                             oracle::log_uniform(rng, 0.1, 10), 100};
        const double L = std::sqrt(double(d));
        RobustEstimator est(K, d, hp);
        const auto h = oracle::random_history(rng, K, d, 80);
        for (const Observation& o : h) {
            est.update(o.arm, o.x, o.r);
            const SharedPosterior sp = est.recompute();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sp.M);
            CHECK(eig.eigenvalues().minCoeff() >= hp.lambda - 1e-9);
            for (int i = 0; i < K; ++i) {
                const Prediction p = est.predict(i, o.x, sp);
                CHECK(p.tau_sq > 0.0);
                CHECK(p.tau_sq <= hp.sigma0_sq + L * L / hp.lambda + 1e-12);
            }
        }
    }
}

TEST_CASE("closed form minimizes the penalized loss") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const int K = 2 + rep % 5, d = 1 + rep % 3;
        const HyperParams hp{oracle::log_uniform(rng, 0.1, 10), oracle::log_uniform(rng, 0.1, 10),
                             oracle::log_uniform(rng, 0.1, 10), 100};
        const auto h = oracle::random_history(rng, K, d, 30);
        const RobustEstimator est = feed(h, K, d, hp);
        const SharedPosterior sp = est.recompute();
        Eigen::VectorXd v(K);
        for (int i = 0; i < K; ++i) v[i] = est.map_v(i, sp);
        const double best = est.map_loss(v, sp.theta_hat);
        CHECK(oracle::rel_diff(best, oracle::loss(h, hp, v, sp.theta_hat)) <= 1e-10);
        for (int k = 0; k < 100; ++k) {
            Eigen::VectorXd dv(K), dt(d);
            for (int i = 0; i < K; ++i) dv[i] = 0.1 * normal(rng);
            for (int j = 0; j < d; ++j) dt[j] = 0.1 * normal(rng);
            CHECK(est.map_loss(v + dv, sp.theta_hat + dt) >= best);
        }
    }
}

TEST_CASE("predict_all equals per-arm predict") {
    std::mt19937_64 rng(13);
    const auto h = oracle::random_history(rng, 4, 2, 25);
    const RobustEstimator est = feed(h, 4, 2, {1.0, 0.5, 1.0, 10});
    const SharedPosterior sp = est.recompute();
    Eigen::MatrixXd ctx = Eigen::MatrixXd::Random(4, 2);
    const auto all = est.predict_all(ctx, sp);
    for (int i = 0; i < 4; ++i) {
        CHECK(all[i].mu_hat == est.predict(i, ctx.row(i).transpose(), sp).mu_hat);
        CHECK(all[i].tau_sq == est.predict(i, ctx.row(i).transpose(), sp).tau_sq);
    }
    CHECK_THROWS_AS(est.predict_all(Eigen::MatrixXd::Zero(3, 2), sp), std::invalid_argument);
}

TEST_CASE("hyper-parameter validation") {
    CHECK_THROWS_AS(RobustEstimator(1, 1, {0.0, 0.0, 1.0, 1}), ConfigError);
    CHECK_THROWS_AS(RobustEstimator(1, 1, {1.0, -1.0, 1.0, 1}), ConfigError);
    CHECK_THROWS_AS(RobustEstimator(1, 1, {1.0, 0.0, 0.0, 1}), ConfigError);
    CHECK_THROWS_AS(RobustEstimator(1, 1, {1.0, 0.0, 1.0, 0}), ConfigError);
    CHECK_THROWS_AS(RobustEstimator(0, 1, {}), ConfigError);
    RobustEstimator est(1, 1, {});
    est.update(0, one(1.0), 1.0);
    est.set_params({1.0, 1.0, 1.0, 10});
    CHECK(est.stats(0).count == 1);
    CHECK(est.weight(0) == 0.5);
}

}
