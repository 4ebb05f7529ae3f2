#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <vector>

#include "fairicp/cond_density.hpp"
#include "fairicp/dataset.hpp"
#include "fairicp/mlp.hpp"

namespace fairicp {

enum class PredictorArch { linear, mlp };
enum class OptimizerKind { sgd, adam };

// Prediction model f. Regression outputs one raw value; classification
// outputs a softmax probability vector. Inputs are standardized with the
// training statistics stored on the model.
struct PredictorModel {
  PredictorArch arch = PredictorArch::linear;
  TaskKind task = TaskKind::regression;
  int n_classes = 0;
  Mlp net;
  ColumnStats x_stats;

  // Rows of X are raw feature rows; returns n x 1 (regression) or the n x C
  // matrix of class probabilities.
  Eigen::MatrixXd predict(const Eigen::MatrixXd& X) const;

  nlohmann::json to_json() const;
  static PredictorModel from_json(const nlohmann::json& j);
};

// Classifier separating observed triples (y_hat, a, y) from resampled ones.
// Output stays strictly inside (0,1): the sigmoid argument is clamped to
// |z| <= 30.
struct Discriminator {
  Mlp net;  // hidden widths 64-64-64, ReLU, scalar output

  Eigen::VectorXd prob(const Eigen::MatrixXd& inputs) const;

  nlohmann::json to_json() const;
  static Discriminator from_json(const nlohmann::json& j);
};

// Encodes (y_hat, a-row, y) triples into discriminator input rows:
// prediction block, one-hot expanded attributes with continuous columns
// standardized by training statistics, then the response (raw for
// regression, one-hot for classification).
class TripleEncoder {
 public:
  TripleEncoder(const Dataset& train);
  Eigen::MatrixXd encode(const Eigen::MatrixXd& y_hat,
                         const Eigen::MatrixXd& a_rows,
                         const Eigen::VectorXd& y) const;
  int dim() const { return dim_; }
  int prediction_width() const { return pred_width_; }

 private:
  std::vector<AttrColumn> a_cols_;
  ColumnStats a_stats_;  // over the expanded attribute block
  std::vector<bool> a_standardize_;
  TaskKind task_;
  int n_classes_ = 0;
  int pred_width_ = 1;
  int dim_ = 0;
};

struct TrainConfig {
  double mu = 0.0;        // fairness trade-off weight in [0, 1]
  double alpha = 1e-2;    // predictor step size
  double disc_alpha = 1e-3;
  int n_g = 1;            // gradient steps per phase
  int epochs = 50;        // T = epochs * ceil(n / batch) outer iterations
  int batch = 32;
  int sampler_sweeps = 50;
  OptimizerKind optimizer = OptimizerKind::sgd;
  PredictorArch arch = PredictorArch::linear;
  int hidden = 64;        // mlp predictor hidden width
  std::uint64_t seed = 0;

  int iterations(Eigen::Index n) const;
  void validate() const;
};

struct IterationLog {
  int iter = 0;
  double lf = 0.0;
  double ld = 0.0;
  double disc_acc = 0.0;
};

struct TrainResult {
  PredictorModel predictor;
  Discriminator discriminator;
  std::vector<IterationLog> history;
};

struct LossGrad {
  double value = 0.0;
  Mlp::Gradients grads;
};

// Average negative log likelihood of the batch: Gaussian with unit variance
// for regression (so 0.5 (y - y_hat)^2 + 0.5 log 2 pi), cross-entropy of the
// softmax outputs for classification. X rows must already be standardized.
LossGrad pred_loss(const PredictorModel& f, const Eigen::MatrixXd& X_std,
                   const Eigen::VectorXd& y);

struct DiscLossGrad {
  double value = 0.0;
  Mlp::Gradients grads;           // w.r.t. discriminator parameters
  Eigen::MatrixXd grad_real_in;   // dL/d(input row) for the real block
  Eigen::MatrixXd grad_fake_in;   // dL/d(input row) for the fake block
};

// Binary cross-entropy with observed triples labeled 1 and resampled triples
// labeled 0. Input gradients are returned so the predictor can descend the
// adversarial term through its predictions.
DiscLossGrad disc_loss(const Discriminator& d, const Eigen::MatrixXd& real,
                       const Eigen::MatrixXd& fake);

double disc_accuracy(const Discriminator& d, const Eigen::MatrixXd& real,
                     const Eigen::MatrixXd& fake);

// (1 - mu) * lf - mu * ld: the minimax objective the predictor descends and
// the discriminator ascends.
double value_function(double mu, double lf, double ld);

// Alternating minimax loop: each outer iteration redraws the permuted copy,
// takes n_g discriminator steps, then n_g predictor steps. With mu == 0 the
// discriminator and sampler are skipped entirely and the run is plain ERM.
TrainResult train_fairicp(const Dataset& train, const CondDensity& q,
                          const TrainConfig& cfg);

// Plain ERM loop sharing the predictor seed streams of train_fairicp; with
// the same config it reproduces train_fairicp(mu = 0) parameter for
// parameter.
PredictorModel train_erm(const Dataset& train, const TrainConfig& cfg);

struct TradeoffPoint {
  double mu = 0.0;
  double test_loss = 0.0;
  double kpc = 0.0;
  double p_value = 1.0;
};

struct SweepOptions {
  int test_copies = 100;  // K for the per-point hypothesis test
  int stat_sweeps = 50;
  std::vector<int> stat_attr_cols;  // statistic restricted to these columns
  const CondDensity* q_test = nullptr;  // density for the test; default q
};

// One trade-off point per grid value, trained with independent seeds derived
// from cfg.seed.
std::vector<TradeoffPoint> sweep_mu(const Dataset& train, const Dataset& test,
                                    const CondDensity& q,
                                    const std::vector<double>& grid,
                                    const TrainConfig& cfg,
                                    const SweepOptions& opts = {});

// Mean prediction NLL of the model on a dataset (raw features).
double evaluate_pred_loss(const PredictorModel& f, const Dataset& ds);

}  // namespace fairicp
