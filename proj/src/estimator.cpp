#include "rbandit/estimator.hpp"

#include <string>

namespace rbandit {

ArmStats::ArmStats(int dim)
    : sum_x(Eigen::VectorXd::Zero(dim)),
      gram(Eigen::MatrixXd::Zero(dim, dim)),
      xr(Eigen::VectorXd::Zero(dim)) {}

Eigen::VectorXd ArmStats::mean_x() const {
    if (count == 0) return Eigen::VectorXd::Zero(sum_x.size());
    return sum_x / count;
}

double ArmStats::mean_r() const { return count == 0 ? 0.0 : sum_r / count; }

RobustEstimator::RobustEstimator(int num_arms, int dim, const HyperParams& hp) : dim_(dim), hp_(hp) {
    if (num_arms < 1 || dim < 1) throw ConfigError("need K >= 1 and d >= 1");
    hp_.validate();
    arms_.assign(num_arms, ArmStats(dim));
}

void RobustEstimator::set_params(const HyperParams& hp) {
    hp.validate();
    hp_ = hp;
}

void RobustEstimator::check_arm(int arm) const {
    if (arm < 0 || arm >= num_arms())
        throw std::out_of_range("arm index " + std::to_string(arm) + " out of range");
}

const ArmStats& RobustEstimator::stats(int arm) const {
    check_arm(arm);
    return arms_[arm];
}

double RobustEstimator::weight(int arm) const {
    check_arm(arm);
    const int n = arms_[arm].count;
    if (n == 0 || hp_.sigma0_sq == 0.0) return 0.0;
    return hp_.sigma0_sq / (hp_.sigma0_sq + hp_.sigma_sq / n);
}

void RobustEstimator::update(int arm, const Eigen::Ref<const Eigen::VectorXd>& x, double r) {
    check_arm(arm);
    if (x.size() != dim_) throw std::invalid_argument("context has wrong dimension");
    ArmStats& s = arms_[arm];
    s.count += 1;
    s.sum_x += x;
    s.sum_r += r;
    s.sum_r_sq += r * r;
    s.gram.noalias() += x * x.transpose();
    s.xr += r * x;
}

SharedPosterior RobustEstimator::recompute() const {
    const double inv_sigma_sq = 1.0 / hp_.sigma_sq;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim_, dim_);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim_);
    for (int i = 0; i < num_arms(); ++i) {
        const ArmStats& s = arms_[i];
        if (s.count == 0) continue;
        // w n xbar xbar' = (w / n) sum_x sum_x'
        const double c = weight(i) / s.count;
        gram += s.gram;
        rhs += s.xr;
        if (c != 0.0) {
            gram.noalias() -= c * s.sum_x * s.sum_x.transpose();
            rhs -= (c * s.sum_r) * s.sum_x;
        }
    }

    SharedPosterior sp;
    sp.M = inv_sigma_sq * gram;
    sp.M.diagonal().array() += hp_.lambda;
    sp.factor.compute(sp.M);
    if (sp.factor.info() != Eigen::Success) throw NumericalError("shared precision matrix is not positive definite");
    sp.theta_hat = sp.factor.solve(inv_sigma_sq * rhs);
    return sp;
}

Prediction RobustEstimator::predict(int arm, const Eigen::Ref<const Eigen::VectorXd>& x,
                                    const SharedPosterior& sp) const {
    check_arm(arm);
    if (x.size() != dim_) throw std::invalid_argument("context has wrong dimension");
    const ArmStats& s = arms_[arm];
    const double w = weight(arm);

    Eigen::VectorXd u = x;
    double mu = sp.theta_hat.dot(x);
    if (w != 0.0) {
        u -= (w / s.count) * s.sum_x;
        mu = w * s.mean_r() + u.dot(sp.theta_hat);
    }
    // u' M^-1 u = ||L^-1 u||^2
    const Eigen::VectorXd y = sp.factor.matrixL().solve(u);
    return {mu, hp_.sigma0_sq * (1.0 - w) + y.squaredNorm()};
}

std::vector<Prediction> RobustEstimator::predict_all(const Eigen::MatrixXd& contexts,
                                                     const SharedPosterior& sp) const {
    if (contexts.rows() != num_arms() || contexts.cols() != dim_)
        throw std::invalid_argument("context matrix must be K x d");
    std::vector<Prediction> out(num_arms());
    for (int i = 0; i < num_arms(); ++i) out[i] = predict(i, contexts.row(i).transpose(), sp);
    return out;
}

double RobustEstimator::map_v(int arm, const SharedPosterior& sp) const {
    check_arm(arm);
    const ArmStats& s = arms_[arm];
    if (s.count == 0) return 0.0;
    return weight(arm) * (s.mean_r() - s.mean_x().dot(sp.theta_hat));
}

double RobustEstimator::map_loss(const Eigen::Ref<const Eigen::VectorXd>& v,
                                 const Eigen::Ref<const Eigen::VectorXd>& theta) const {
    if (hp_.sigma0_sq == 0.0) throw std::domain_error("map_loss needs sigma0_sq > 0");
    if (v.size() != num_arms() || theta.size() != dim_) throw std::invalid_argument("wrong parameter dimensions");

    double loss = hp_.lambda * theta.squaredNorm();
    for (int i = 0; i < num_arms(); ++i) {
        const ArmStats& s = arms_[i];
        const double vi = v[i];
        // ||r - X theta - v 1||^2 expanded through the sufficient statistics
        const double rss = s.sum_r_sq - 2.0 * theta.dot(s.xr) - 2.0 * vi * s.sum_r + theta.dot(s.gram * theta) +
                           2.0 * vi * theta.dot(s.sum_x) + s.count * vi * vi;
        loss += rss / hp_.sigma_sq + vi * vi / hp_.sigma0_sq;
    }
    return loss;
}

}  // namespace rbandit
