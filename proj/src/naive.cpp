#include "rbandit/naive.hpp"

#include <string>

namespace rbandit {

AugmentedRegression::AugmentedRegression(int num_arms, int dim, const HyperParams& hp)
    : num_arms_(num_arms), dim_(dim), hp_(hp) {
    if (num_arms < 1 || dim < 1) throw ConfigError("need K >= 1 and d >= 1");
    hp_.validate();
    if (!(hp_.sigma0_sq > 0.0)) throw ConfigError("augmented regression needs sigma0_sq > 0");
    const int p = dim + num_arms;
    precision_ = Eigen::MatrixXd::Zero(p, p);
    precision_.diagonal().head(dim).setConstant(hp_.lambda);
    precision_.diagonal().tail(num_arms).setConstant(1.0 / hp_.sigma0_sq);
    cross_ = Eigen::VectorXd::Zero(p);
}

Eigen::VectorXd AugmentedRegression::augment(const Eigen::Ref<const Eigen::VectorXd>& x, int arm) const {
    if (arm < 0 || arm >= num_arms_) throw std::out_of_range("arm index " + std::to_string(arm) + " out of range");
    if (x.size() != dim_) throw std::invalid_argument("context has wrong dimension");
    Eigen::VectorXd z = Eigen::VectorXd::Zero(dim_ + num_arms_);
    z.head(dim_) = x;
    z[dim_ + arm] = 1.0;
    return z;
}

void AugmentedRegression::update(const Eigen::Ref<const Eigen::VectorXd>& z, double r) {
    if (z.size() != dim_ + num_arms_) throw std::invalid_argument("augmented feature has wrong dimension");
    const double inv_sigma_sq = 1.0 / hp_.sigma_sq;
    precision_.noalias() += inv_sigma_sq * z * z.transpose();
    cross_ += (inv_sigma_sq * r) * z;
    stale_ = true;
}

void AugmentedRegression::refresh() const {
    if (!stale_) return;
    factor_.compute(precision_);
    if (factor_.info() != Eigen::Success) throw NumericalError("augmented precision matrix is not positive definite");
    gamma_ = factor_.solve(cross_);
    stale_ = false;
}

std::pair<double, double> AugmentedRegression::predict(const Eigen::Ref<const Eigen::VectorXd>& z) const {
    if (z.size() != dim_ + num_arms_) throw std::invalid_argument("augmented feature has wrong dimension");
    refresh();
    const Eigen::VectorXd y = factor_.matrixL().solve(z);
    return {z.dot(gamma_), y.squaredNorm()};
}

std::vector<Prediction> AugmentedRegression::predict_all(const Eigen::MatrixXd& contexts) const {
    if (contexts.rows() != num_arms_ || contexts.cols() != dim_)
        throw std::invalid_argument("context matrix must be K x d");
    refresh();
    const int p = dim_ + num_arms_;
    Eigen::MatrixXd Z(p, num_arms_);
    Z.topRows(dim_) = contexts.transpose();
    Z.bottomRows(num_arms_).setIdentity();

    const Eigen::VectorXd means = Z.transpose() * gamma_;
    factor_.matrixL().solveInPlace(Z);
    const Eigen::VectorXd vars = Z.colwise().squaredNorm().transpose();

    std::vector<Prediction> out(num_arms_);
    for (int i = 0; i < num_arms_; ++i) out[i] = {means[i], vars[i]};
    return out;
}

AugmentedPosterior AugmentedRegression::posterior() const {
    refresh();
    const int p = dim_ + num_arms_;
    AugmentedPosterior post;
    post.gamma = gamma_;
    post.Sigma = factor_.solve(Eigen::MatrixXd::Identity(p, p));
    post.Sigma = 0.5 * (post.Sigma + post.Sigma.transpose()).eval();
    post.Sigma0 = Eigen::MatrixXd::Zero(p, p);
    post.Sigma0.diagonal().head(dim_).setConstant(1.0 / hp_.lambda);
    post.Sigma0.diagonal().tail(num_arms_).setConstant(hp_.sigma0_sq);
    return post;
}

}  // namespace rbandit
