#include "fairicp/mlp.hpp"

#include <cmath>

#include "fairicp/errors.hpp"

namespace fairicp {

void Mlp::Gradients::set_zero() {
  for (auto& w : W) w.setZero();
  for (auto& v : b) v.setZero();
}

void Mlp::Gradients::axpy(double scale, const Gradients& other) {
  for (std::size_t l = 0; l < W.size(); ++l) {
    W[l] += scale * other.W[l];
    b[l] += scale * other.b[l];
  }
}

double Mlp::Gradients::squared_norm() const {
  double s = 0.0;
  for (const auto& w : W) s += w.squaredNorm();
  for (const auto& v : b) s += v.squaredNorm();
  return s;
}

Mlp::Mlp(const std::vector<int>& sizes, Rng& rng) : sizes_(sizes) {
  if (sizes.size() < 2) throw ConfigError("mlp: need at least in/out sizes");
  for (int s : sizes)
    if (s < 1) throw ConfigError("mlp: layer sizes must be positive");
  const auto layers = sizes.size() - 1;
  W_.resize(layers);
  b_.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    const int fan_in = sizes[l];
    const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
    W_[l].resize(sizes[l + 1], sizes[l]);
    for (Eigen::Index r = 0; r < W_[l].rows(); ++r)
      for (Eigen::Index c = 0; c < W_[l].cols(); ++c)
        W_[l](r, c) = scale * rng.normal();
    b_[l] = Eigen::VectorXd::Zero(sizes[l + 1]);
  }
}

Mlp::Forward Mlp::forward(const Eigen::MatrixXd& X) const {
  if (X.cols() != in_dim()) throw RuntimeError("mlp: input width mismatch");
  Forward fwd;
  fwd.layer_out.reserve(W_.size() + 1);
  fwd.layer_out.push_back(X);
  for (std::size_t l = 0; l < W_.size(); ++l) {
    Eigen::MatrixXd z = fwd.layer_out.back() * W_[l].transpose();
    z.rowwise() += b_[l].transpose();
    if (l + 1 < W_.size()) z = z.cwiseMax(0.0);  // ReLU on hidden layers
    fwd.layer_out.push_back(std::move(z));
  }
  return fwd;
}

Eigen::MatrixXd Mlp::predict(const Eigen::MatrixXd& X) const {
  return forward(X).output();
}

Eigen::MatrixXd Mlp::backward(const Forward& fwd,
                              const Eigen::MatrixXd& grad_out,
                              Gradients& grads) const {
  const auto layers = W_.size();
  Eigen::MatrixXd delta = grad_out;
  for (std::size_t l = layers; l-- > 0;) {
    if (l + 1 < layers) {
      // Chain through the ReLU of layer l+1's input side.
      delta = delta.cwiseProduct(
          (fwd.layer_out[l + 1].array() > 0.0).cast<double>().matrix());
    }
    grads.W[l] += delta.transpose() * fwd.layer_out[l];
    grads.b[l] += delta.colwise().sum().transpose();
    if (l > 0) delta = delta * W_[l];
  }
  return delta * W_[0];
}

Mlp::Gradients Mlp::zero_gradients() const {
  Gradients g;
  g.W.reserve(W_.size());
  g.b.reserve(b_.size());
  for (std::size_t l = 0; l < W_.size(); ++l) {
    g.W.push_back(Eigen::MatrixXd::Zero(W_[l].rows(), W_[l].cols()));
    g.b.push_back(Eigen::VectorXd::Zero(b_[l].size()));
  }
  return g;
}

void Mlp::sgd_step(const Gradients& grads, double lr) {
  for (std::size_t l = 0; l < W_.size(); ++l) {
    W_[l] -= lr * grads.W[l];
    b_[l] -= lr * grads.b[l];
  }
}

Eigen::VectorXd Mlp::flatten() const {
  Eigen::Index total = 0;
  for (std::size_t l = 0; l < W_.size(); ++l)
    total += W_[l].size() + b_[l].size();
  Eigen::VectorXd theta(total);
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < W_.size(); ++l) {
    for (Eigen::Index r = 0; r < W_[l].rows(); ++r)
      for (Eigen::Index c = 0; c < W_[l].cols(); ++c) theta(at++) = W_[l](r, c);
    for (Eigen::Index r = 0; r < b_[l].size(); ++r) theta(at++) = b_[l](r);
  }
  return theta;
}

void Mlp::unflatten(const Eigen::VectorXd& theta) {
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < W_.size(); ++l) {
    for (Eigen::Index r = 0; r < W_[l].rows(); ++r)
      for (Eigen::Index c = 0; c < W_[l].cols(); ++c) W_[l](r, c) = theta(at++);
    for (Eigen::Index r = 0; r < b_[l].size(); ++r) b_[l](r) = theta(at++);
  }
  if (at != theta.size()) throw RuntimeError("mlp: flat parameter size mismatch");
}

AdamState::AdamState(const Mlp& net)
    : m_(net.zero_gradients()), v_(net.zero_gradients()) {}

void AdamState::step(Mlp& net, const Mlp::Gradients& grads, double lr,
                     double beta1, double beta2, double eps) {
  ++t_;
  Mlp::Gradients update = net.zero_gradients();
  const double bc1 = 1.0 - std::pow(beta1, t_);
  const double bc2 = 1.0 - std::pow(beta2, t_);
  for (std::size_t l = 0; l < update.W.size(); ++l) {
    m_.W[l] = beta1 * m_.W[l] + (1.0 - beta1) * grads.W[l];
    v_.W[l] = beta2 * v_.W[l] +
              (1.0 - beta2) * grads.W[l].cwiseProduct(grads.W[l]);
    update.W[l] = (m_.W[l] / bc1).cwiseQuotient(
        ((v_.W[l] / bc2).cwiseSqrt().array() + eps).matrix());
    m_.b[l] = beta1 * m_.b[l] + (1.0 - beta1) * grads.b[l];
    v_.b[l] = beta2 * v_.b[l] +
              (1.0 - beta2) * grads.b[l].cwiseProduct(grads.b[l]);
    update.b[l] = (m_.b[l] / bc1).cwiseQuotient(
        ((v_.b[l] / bc2).cwiseSqrt().array() + eps).matrix());
  }
  net.sgd_step(update, lr);
}

}  // namespace fairicp
