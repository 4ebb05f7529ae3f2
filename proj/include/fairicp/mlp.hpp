#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fairicp/rng.hpp"

namespace fairicp {

// Fully-connected network with ReLU hidden layers and a linear output.
// Gradients are computed by hand; nothing here allocates per-sample.
class Mlp {
 public:
  struct Gradients {
    std::vector<Eigen::MatrixXd> W;
    std::vector<Eigen::VectorXd> b;
    void set_zero();
    void axpy(double scale, const Gradients& other);  // this += scale * other
    double squared_norm() const;
  };

  // Activations cached by a forward pass. layer_out[0] is the input batch;
  // layer_out[l] for l >= 1 holds the post-ReLU (or, for the last layer,
  // linear) outputs of layer l.
  struct Forward {
    std::vector<Eigen::MatrixXd> layer_out;
    const Eigen::MatrixXd& output() const { return layer_out.back(); }
  };

  Mlp() = default;
  // sizes = {in, hidden..., out}; weights get scaled-normal init, biases 0.
  Mlp(const std::vector<int>& sizes, Rng& rng);

  int in_dim() const { return sizes_.front(); }
  int out_dim() const { return sizes_.back(); }
  int layer_count() const { return static_cast<int>(W_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return W_; }
  const std::vector<Eigen::VectorXd>& biases() const { return b_; }

  // Rows of X are samples.
  Forward forward(const Eigen::MatrixXd& X) const;
  Eigen::MatrixXd predict(const Eigen::MatrixXd& X) const;

  // Backpropagates dL/d(output); accumulates into grads (callers zero it)
  // and returns dL/d(input) for pass-through terms.
  Eigen::MatrixXd backward(const Forward& fwd, const Eigen::MatrixXd& grad_out,
                           Gradients& grads) const;

  Gradients zero_gradients() const;
  void sgd_step(const Gradients& grads, double lr);

  // Flat parameter vector (layer by layer, weights row-major then biases);
  // used by finite-difference checks and serialization.
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& theta);

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXd> W_;  // W_[l]: sizes_[l+1] x sizes_[l]
  std::vector<Eigen::VectorXd> b_;
};

// Adam with the usual bias correction; state shapes mirror the network.
class AdamState {
 public:
  explicit AdamState(const Mlp& net);
  void step(Mlp& net, const Mlp::Gradients& grads, double lr,
            double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

 private:
  Mlp::Gradients m_, v_;
  int t_ = 0;
};

}  // namespace fairicp
