#include "fairicp/trainer.hpp"

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>

#include "fairicp/eo_test.hpp"
#include "fairicp/errors.hpp"
#include "fairicp/json_eigen.hpp"
#include "fairicp/kpc.hpp"
#include "fairicp/perm_sampler.hpp"

namespace fairicp {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kSigmoidClamp = 30.0;

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double zmax = logits.row(i).maxCoeff();
    Eigen::ArrayXd e = (logits.row(i).array() - zmax).exp();
    p.row(i) = (e / e.sum()).matrix();
  }
  return p;
}

std::vector<int> predictor_sizes(const Dataset& train, const TrainConfig& cfg) {
  const int in = static_cast<int>(train.d_x());
  const int out =
      train.task == TaskKind::classification ? train.n_classes : 1;
  if (cfg.arch == PredictorArch::linear) return {std::max(in, 1), out};
  return {std::max(in, 1), cfg.hidden, out};
}

struct Streams {
  Rng init_f;
  Rng init_d;
  Rng pred_batches;
  Rng disc_batches;
  std::uint64_t sampler_root;

  explicit Streams(std::uint64_t seed)
      : init_f(mix_seed(seed, 1)),
        init_d(mix_seed(seed, 2)),
        pred_batches(mix_seed(seed, 3)),
        disc_batches(mix_seed(seed, 4)),
        sampler_root(mix_seed(seed, 5)) {}
};

std::vector<int> draw_batch(Rng& rng, Eigen::Index n, int batch) {
  std::vector<int> idx(static_cast<std::size_t>(batch));
  for (auto& i : idx)
    i = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
  return idx;
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& M, const std::vector<int>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), M.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = M.row(idx[i]);
  return out;
}

Eigen::VectorXd entries_of(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
  return out;
}

// Loss value and gradient w.r.t. the network's raw outputs.
double loss_on_outputs(const PredictorModel& f, const Eigen::MatrixXd& out,
                       const Eigen::VectorXd& y, Eigen::MatrixXd* grad_out,
                       Eigen::MatrixXd* probs_out = nullptr) {
  const auto B = static_cast<double>(out.rows());
  if (f.task == TaskKind::regression) {
    const Eigen::VectorXd resid = out.col(0) - y;
    if (grad_out) *grad_out = resid / B;
    return 0.5 * resid.squaredNorm() / B + kHalfLog2Pi;
  }
  const Eigen::MatrixXd P = softmax_rows(out);
  double nll = 0.0;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    nll -= std::log(std::max(P(i, static_cast<int>(y(i))), 1e-300));
  if (grad_out) {
    *grad_out = P / B;
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      (*grad_out)(i, static_cast<int>(y(i))) -= 1.0 / B;
  }
  if (probs_out) *probs_out = P;
  return nll / B;
}

// dL/d(probabilities) -> dL/d(logits) through the softmax Jacobian.
Eigen::MatrixXd softmax_backward(const Eigen::MatrixXd& probs,
                                 const Eigen::MatrixXd& grad_probs) {
  Eigen::MatrixXd grad_logits(probs.rows(), probs.cols());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const double dot = probs.row(i).dot(grad_probs.row(i));
    grad_logits.row(i) =
        probs.row(i).cwiseProduct(grad_probs.row(i) -
                                  Eigen::RowVectorXd::Constant(probs.cols(), dot));
  }
  return grad_logits;
}

struct Optimizer {
  OptimizerKind kind;
  double lr;
  std::optional<AdamState> adam;

  Optimizer(OptimizerKind kind, double lr, const Mlp& net)
      : kind(kind), lr(lr) {
    if (kind == OptimizerKind::adam) adam.emplace(net);
  }
  void step(Mlp& net, const Mlp::Gradients& grads) {
    if (kind == OptimizerKind::adam)
      adam->step(net, grads, lr);
    else
      net.sgd_step(grads, lr);
  }
};

void check_finite(double v, int iter, const char* what) {
  if (!std::isfinite(v))
    throw RuntimeError(std::string("training diverged: non-finite ") + what +
                       " at iteration " + std::to_string(iter));
}

}  // namespace

int TrainConfig::iterations(Eigen::Index n) const {
  const auto per_epoch = static_cast<int>((n + batch - 1) / batch);
  return std::max(1, epochs * std::max(1, per_epoch));
}

void TrainConfig::validate() const {
  if (mu < 0.0 || mu > 1.0) throw ConfigError("train: mu must lie in [0, 1]");
  if (!(alpha > 0.0) || !(disc_alpha > 0.0))
    throw ConfigError("train: step sizes must be positive");
  if (n_g < 1 || epochs < 1 || batch < 1 || sampler_sweeps < 1)
    throw ConfigError("train: counts must be >= 1");
  if (hidden < 1) throw ConfigError("train: hidden width must be >= 1");
}

Eigen::MatrixXd PredictorModel::predict(const Eigen::MatrixXd& X) const {
  const Eigen::MatrixXd Xs = standardize_columns(X, x_stats);
  const Eigen::MatrixXd out = net.predict(Xs);
  return task == TaskKind::classification ? softmax_rows(out) : out;
}

Eigen::VectorXd Discriminator::prob(const Eigen::MatrixXd& inputs) const {
  Eigen::VectorXd z = net.predict(inputs).col(0);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double c = std::clamp(z(i), -kSigmoidClamp, kSigmoidClamp);
    z(i) = 1.0 / (1.0 + std::exp(-c));
  }
  return z;
}

TripleEncoder::TripleEncoder(const Dataset& train)
    : a_cols_(train.a_cols), task_(train.task), n_classes_(train.n_classes) {
  const Eigen::MatrixXd expanded =
      expand_attributes(train.A, a_cols_, OneHot::full);
  a_stats_ = column_stats(expanded);
  // Only continuous attribute columns are standardized; indicators pass
  // through untouched.
  a_standardize_.assign(static_cast<std::size_t>(expanded.cols()), false);
  std::size_t at = 0;
  for (const auto& c : a_cols_) {
    if (!c.categorical) {
      a_standardize_[at++] = true;
    } else {
      at += static_cast<std::size_t>(c.levels);
    }
  }
  pred_width_ = task_ == TaskKind::classification ? n_classes_ : 1;
  const int y_width = pred_width_ == 1 ? 1 : n_classes_;
  dim_ = pred_width_ + static_cast<int>(expanded.cols()) + y_width;
}

Eigen::MatrixXd TripleEncoder::encode(const Eigen::MatrixXd& y_hat,
                                      const Eigen::MatrixXd& a_rows,
                                      const Eigen::VectorXd& y) const {
  const Eigen::Index n = y.size();
  if (y_hat.rows() != n || a_rows.rows() != n)
    throw RuntimeError("triple encoder: row counts differ");
  if (y_hat.cols() != pred_width_)
    throw RuntimeError("triple encoder: prediction width mismatch");

  Eigen::MatrixXd a_enc = expand_attributes(a_rows, a_cols_, OneHot::full);
  for (Eigen::Index j = 0; j < a_enc.cols(); ++j) {
    if (!a_standardize_[static_cast<std::size_t>(j)]) continue;
    if (a_stats_.sd(j) == 0.0)
      a_enc.col(j).setZero();
    else
      a_enc.col(j) = (a_enc.col(j).array() - a_stats_.mean(j)) / a_stats_.sd(j);
  }

  Eigen::MatrixXd out(n, dim_);
  out.leftCols(pred_width_) = y_hat;
  out.middleCols(pred_width_, a_enc.cols()) = a_enc;
  if (task_ == TaskKind::regression) {
    out.rightCols(1) = y;
  } else {
    out.rightCols(n_classes_) =
        statistic_response_encoding(y, task_, n_classes_);
  }
  return out;
}

LossGrad pred_loss(const PredictorModel& f, const Eigen::MatrixXd& X_std,
                   const Eigen::VectorXd& y) {
  if (X_std.rows() == 0) throw RuntimeError("pred_loss: empty batch");
  const Mlp::Forward fwd = f.net.forward(X_std);
  Eigen::MatrixXd grad_out;
  LossGrad lg;
  lg.value = loss_on_outputs(f, fwd.output(), y, &grad_out);
  if (!std::isfinite(lg.value))
    throw RuntimeError("pred_loss: non-finite forward value");
  lg.grads = f.net.zero_gradients();
  f.net.backward(fwd, grad_out, lg.grads);
  return lg;
}

DiscLossGrad disc_loss(const Discriminator& d, const Eigen::MatrixXd& real,
                       const Eigen::MatrixXd& fake) {
  if (real.rows() != fake.rows())
    throw RuntimeError("disc_loss: real/fake batch sizes differ");
  if (real.rows() == 0) throw RuntimeError("disc_loss: empty batch");
  const auto B = static_cast<double>(real.rows());

  const Mlp::Forward fwd_real = d.net.forward(real);
  const Mlp::Forward fwd_fake = d.net.forward(fake);

  DiscLossGrad out;
  out.grads = d.net.zero_gradients();
  Eigen::MatrixXd gz_real(real.rows(), 1), gz_fake(fake.rows(), 1);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < real.rows(); ++i) {
    const double z = fwd_real.output()(i, 0);
    const double zc = std::clamp(z, -kSigmoidClamp, kSigmoidClamp);
    const double p = 1.0 / (1.0 + std::exp(-zc));
    loss -= std::log(p);
    const bool sat = std::abs(z) >= kSigmoidClamp;
    gz_real(i, 0) = sat ? 0.0 : (p - 1.0) / B;
  }
  for (Eigen::Index i = 0; i < fake.rows(); ++i) {
    const double z = fwd_fake.output()(i, 0);
    const double zc = std::clamp(z, -kSigmoidClamp, kSigmoidClamp);
    const double p = 1.0 / (1.0 + std::exp(-zc));
    loss -= std::log(1.0 - p);
    const bool sat = std::abs(z) >= kSigmoidClamp;
    gz_fake(i, 0) = sat ? 0.0 : p / B;
  }
  out.value = loss / B;
  if (!std::isfinite(out.value))
    throw RuntimeError("disc_loss: non-finite forward value");
  out.grad_real_in = d.net.backward(fwd_real, gz_real, out.grads);
  out.grad_fake_in = d.net.backward(fwd_fake, gz_fake, out.grads);
  return out;
}

double disc_accuracy(const Discriminator& d, const Eigen::MatrixXd& real,
                     const Eigen::MatrixXd& fake) {
  const Eigen::VectorXd pr = d.prob(real);
  const Eigen::VectorXd pf = d.prob(fake);
  double correct = 0.0;
  for (Eigen::Index i = 0; i < pr.size(); ++i) correct += pr(i) > 0.5 ? 1.0 : 0.0;
  for (Eigen::Index i = 0; i < pf.size(); ++i) correct += pf(i) < 0.5 ? 1.0 : 0.0;
  return correct / static_cast<double>(pr.size() + pf.size());
}

double value_function(double mu, double lf, double ld) {
  if (mu < 0.0 || mu > 1.0) throw ConfigError("value_function: mu outside [0, 1]");
  return (1.0 - mu) * lf - mu * ld;
}

namespace {

PredictorModel make_predictor(const Dataset& train, const TrainConfig& cfg,
                              Rng& init_rng) {
  PredictorModel f;
  f.arch = cfg.arch;
  f.task = train.task;
  f.n_classes = train.n_classes;
  f.x_stats = column_stats(train.X);
  f.net = Mlp(predictor_sizes(train, cfg), init_rng);
  return f;
}

// One predictor phase step shared by the adversarial and plain loops. The
// adversarial pieces are null for mu == 0 so both loops consume identical
// randomness.
void predictor_step(PredictorModel& f, Optimizer& opt, const Dataset& train,
                    const Eigen::MatrixXd& Xs, const TrainConfig& cfg,
                    Rng& pred_batches, int iter,
                    const Discriminator* d, const TripleEncoder* encoder,
                    const Eigen::MatrixXd* a_tilde, IterationLog* log) {
  const std::vector<int> idx = draw_batch(pred_batches, train.n(), cfg.batch);
  const Eigen::MatrixXd Xb = rows_of(Xs, idx);
  const Eigen::VectorXd yb = entries_of(train.Y, idx);

  const Mlp::Forward fwd = f.net.forward(Xb);
  Eigen::MatrixXd grad_out, probs;
  const double lf =
      loss_on_outputs(f, fwd.output(), yb, &grad_out, &probs);
  check_finite(lf, iter, "prediction loss");
  Eigen::MatrixXd total_grad_out = (1.0 - cfg.mu) * grad_out;

  double ld = std::numeric_limits<double>::quiet_NaN();
  double acc = std::numeric_limits<double>::quiet_NaN();
  if (d != nullptr) {
    const Eigen::MatrixXd y_hat =
        f.task == TaskKind::classification ? probs : fwd.output();
    const Eigen::MatrixXd real =
        encoder->encode(y_hat, rows_of(train.A, idx), yb);
    const Eigen::MatrixXd fake =
        encoder->encode(y_hat, rows_of(*a_tilde, idx), yb);
    const DiscLossGrad dl = disc_loss(*d, real, fake);
    check_finite(dl.value, iter, "discriminator loss");
    ld = dl.value;
    acc = disc_accuracy(*d, real, fake);
    // Predictions feed both blocks of the discriminator input.
    const int w = encoder->prediction_width();
    Eigen::MatrixXd grad_yhat =
        dl.grad_real_in.leftCols(w) + dl.grad_fake_in.leftCols(w);
    if (f.task == TaskKind::classification)
      grad_yhat = softmax_backward(probs, grad_yhat);
    total_grad_out -= cfg.mu * grad_yhat;
  }

  Mlp::Gradients grads = f.net.zero_gradients();
  f.net.backward(fwd, total_grad_out, grads);
  opt.step(f.net, grads);

  if (log != nullptr) {
    log->lf = lf;
    log->ld = ld;
    log->disc_acc = acc;
  }
}

}  // namespace

TrainResult train_fairicp(const Dataset& train, const CondDensity& q,
                          const TrainConfig& cfg) {
  train.validate();
  cfg.validate();
  if (cfg.mu > 0.0 && q.direction() != Direction::y_given_a)
    throw RuntimeError("train_fairicp: q must model Y given A");

  Streams streams(cfg.seed);
  TrainResult result;
  result.predictor = make_predictor(train, cfg, streams.init_f);
  const Eigen::MatrixXd Xs =
      standardize_columns(train.X, result.predictor.x_stats);

  const TripleEncoder encoder(train);
  result.discriminator.net =
      Mlp({encoder.dim(), 64, 64, 64, 1}, streams.init_d);

  Optimizer opt_f(cfg.optimizer, cfg.alpha, result.predictor.net);
  Optimizer opt_d(cfg.optimizer, cfg.disc_alpha, result.discriminator.net);

  std::optional<PermutationSampler> sampler;
  if (cfg.mu > 0.0)
    sampler.emplace(q, train.A, train.Y,
                    q.is_oracle() ? PermMethod::oracle_icp : PermMethod::icp);

  const int T = cfg.iterations(train.n());
  result.history.reserve(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    Eigen::MatrixXd a_tilde;
    if (cfg.mu > 0.0) {
      a_tilde = sampler
                    ->draw(cfg.sampler_sweeps, mix_seed(streams.sampler_root, t))
                    .a_tilde;
      for (int g = 0; g < cfg.n_g; ++g) {
        const std::vector<int> idx =
            draw_batch(streams.disc_batches, train.n(), cfg.batch);
        const Eigen::MatrixXd y_hat =
            result.predictor.task == TaskKind::classification
                ? softmax_rows(result.predictor.net.predict(rows_of(Xs, idx)))
                : result.predictor.net.predict(rows_of(Xs, idx));
        const Eigen::VectorXd yb = entries_of(train.Y, idx);
        const Eigen::MatrixXd real =
            encoder.encode(y_hat, rows_of(train.A, idx), yb);
        const Eigen::MatrixXd fake =
            encoder.encode(y_hat, rows_of(a_tilde, idx), yb);
        const DiscLossGrad dl = disc_loss(result.discriminator, real, fake);
        check_finite(dl.value, t, "discriminator loss");
        opt_d.step(result.discriminator.net, dl.grads);
      }
    }

    IterationLog log;
    log.iter = t;
    for (int g = 0; g < cfg.n_g; ++g) {
      predictor_step(result.predictor, opt_f, train, Xs, cfg,
                     streams.pred_batches, t,
                     cfg.mu > 0.0 ? &result.discriminator : nullptr,
                     cfg.mu > 0.0 ? &encoder : nullptr,
                     cfg.mu > 0.0 ? &a_tilde : nullptr, &log);
    }
    result.history.push_back(log);
  }
  return result;
}

PredictorModel train_erm(const Dataset& train, const TrainConfig& cfg) {
  train.validate();
  cfg.validate();

  Streams streams(cfg.seed);
  PredictorModel f = make_predictor(train, cfg, streams.init_f);
  const Eigen::MatrixXd Xs = standardize_columns(train.X, f.x_stats);
  TrainConfig plain = cfg;
  plain.mu = 0.0;
  Optimizer opt(plain.optimizer, plain.alpha, f.net);
  const int T = plain.iterations(train.n());
  for (int t = 0; t < T; ++t) {
    for (int g = 0; g < plain.n_g; ++g)
      predictor_step(f, opt, train, Xs, plain, streams.pred_batches, t,
                     nullptr, nullptr, nullptr, nullptr);
  }
  return f;
}

double evaluate_pred_loss(const PredictorModel& f, const Dataset& ds) {
  const Eigen::MatrixXd Xs = standardize_columns(ds.X, f.x_stats);
  const Eigen::MatrixXd out = f.net.predict(Xs);
  return loss_on_outputs(f, out, ds.Y, nullptr);
}

std::vector<TradeoffPoint> sweep_mu(const Dataset& train, const Dataset& test,
                                    const CondDensity& q,
                                    const std::vector<double>& grid,
                                    const TrainConfig& cfg,
                                    const SweepOptions& opts) {
  std::vector<TradeoffPoint> points;
  points.reserve(grid.size());
  const CondDensity& q_test = opts.q_test ? *opts.q_test : q;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    TrainConfig run_cfg = cfg;
    run_cfg.mu = grid[i];
    run_cfg.seed = mix_seed(cfg.seed, 0x100 + i);
    const TrainResult trained = train_fairicp(train, q, run_cfg);

    TradeoffPoint pt;
    pt.mu = grid[i];
    pt.test_loss = evaluate_pred_loss(trained.predictor, test);

    EoInputs in;
    in.y_hat = trained.predictor.predict(test.X);
    in.A = test.A;
    in.a_cols = test.a_cols;
    in.y = test.Y;
    in.task = test.task;
    in.n_classes = test.n_classes;

    EoTestOptions eo_opts;
    eo_opts.sweeps = opts.stat_sweeps;
    eo_opts.stat_attr_cols = opts.stat_attr_cols;
    const Eigen::MatrixXd V =
        statistic_attr_encoding(test.A, test.a_cols, opts.stat_attr_cols);
    const Eigen::MatrixXd W =
        statistic_response_encoding(test.Y, test.task, test.n_classes);
    pt.kpc = kpc_estimate(in.y_hat, V, W, eo_opts.kpc);
    pt.p_value = eo_test(in, q_test, opts.test_copies,
                         mix_seed(run_cfg.seed, 0xE0), eo_opts)
                     .p_value;
    points.push_back(pt);
  }
  return points;
}

nlohmann::json PredictorModel::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["kind"] = "predictor";
  j["arch"] = arch == PredictorArch::linear ? "linear" : "mlp";
  j["task"] = task == TaskKind::regression ? "regression" : "classification";
  j["n_classes"] = n_classes;
  j["sizes"] = net.sizes();
  nlohmann::json weights = nlohmann::json::array();
  for (const auto& w : net.weights()) weights.push_back(matrix_to_json(w));
  j["weights"] = std::move(weights);
  nlohmann::json biases = nlohmann::json::array();
  for (const auto& b : net.biases()) biases.push_back(vector_to_json(b));
  j["biases"] = std::move(biases);
  j["x_mean"] = vector_to_json(x_stats.mean);
  j["x_sd"] = vector_to_json(x_stats.sd);
  return j;
}

namespace {

Mlp mlp_from_json(const nlohmann::json& j) {
  const auto sizes = j.at("sizes").get<std::vector<int>>();
  Rng dummy(0);
  Mlp net(sizes, dummy);
  Eigen::Index total = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
    total += static_cast<Eigen::Index>(sizes[l + 1]) * (sizes[l] + 1);
  Eigen::VectorXd theta(total);
  Eigen::Index at = 0;
  const auto& weights = j.at("weights");
  const auto& biases = j.at("biases");
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const Eigen::MatrixXd w = matrix_from_json(weights.at(l));
    const Eigen::VectorXd b = vector_from_json(biases.at(l));
    if (w.rows() != sizes[l + 1] || w.cols() != sizes[l] ||
        b.size() != sizes[l + 1])
      throw ConfigError("model: weight shapes do not match sizes");
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) theta(at++) = w(r, c);
    for (Eigen::Index r = 0; r < b.size(); ++r) theta(at++) = b(r);
  }
  net.unflatten(theta);
  return net;
}

}  // namespace

PredictorModel PredictorModel::from_json(const nlohmann::json& j) {
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw ConfigError("predictor: unsupported document version");
  PredictorModel f;
  f.arch = j.at("arch").get<std::string>() == "linear" ? PredictorArch::linear
                                                       : PredictorArch::mlp;
  f.task = j.at("task").get<std::string>() == "regression"
               ? TaskKind::regression
               : TaskKind::classification;
  f.n_classes = j.at("n_classes").get<int>();
  f.net = mlp_from_json(j);
  f.x_stats.mean = vector_from_json(j.at("x_mean"));
  f.x_stats.sd = vector_from_json(j.at("x_sd"));
  return f;
}

nlohmann::json Discriminator::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["kind"] = "discriminator";
  j["sizes"] = net.sizes();
  nlohmann::json weights = nlohmann::json::array();
  for (const auto& w : net.weights()) weights.push_back(matrix_to_json(w));
  j["weights"] = std::move(weights);
  nlohmann::json biases = nlohmann::json::array();
  for (const auto& b : net.biases()) biases.push_back(vector_to_json(b));
  j["biases"] = std::move(biases);
  return j;
}

Discriminator Discriminator::from_json(const nlohmann::json& j) {
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw ConfigError("discriminator: unsupported document version");
  Discriminator d;
  d.net = mlp_from_json(j);
  return d;
}

}  // namespace fairicp
