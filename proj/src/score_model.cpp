#include "eqflow/score_model.hpp"

#include <cmath>
#include <numbers>

#include "eqflow/adam.hpp"
#include "eqflow/positional.hpp"

namespace eqflow {

Objective parse_objective(const std::string& name) {
  if (name == "eps") return Objective::Eps;
  if (name == "v") return Objective::V;
  throw InputError("unknown objective: " + name);
}

std::string objective_name(Objective o) {
  return o == Objective::Eps ? "eps" : "v";
}

DenseDenoiser::DenseDenoiser(int dim, Objective obj, int pe_octaves,
                             std::vector<int> hidden, std::uint64_t seed)
    : d_(dim), obj_(obj), pe_(pe_octaves) {
  require(d_ >= 1, "DenseDenoiser: dim must be >= 1");
  std::vector<int> widths;
  widths.push_back(encoded_dim(d_ + 1, pe_));
  for (int h : hidden) widths.push_back(h);
  widths.push_back(d_);
  net_ = Mlp(widths, seed);
}

Mat DenseDenoiser::encode(const Mat& X, const Vec& taus) const {
  require(X.rows() == d_, "DenseDenoiser: state dim mismatch");
  require(X.cols() == taus.size(), "DenseDenoiser: tau count mismatch");
  Mat joint(d_ + 1, X.cols());
  joint.topRows(d_) = X;
  joint.row(d_) = taus.transpose();
  return encode_with_input(joint, pe_);
}

Mat DenseDenoiser::predict_batch(const Mat& X, const Vec& taus) const {
  return net_.forward(encode(X, taus));
}

Vec DenseDenoiser::predict(const Vec& x, double tau) const {
  Vec taus(1);
  taus << tau;
  return predict_batch(x, taus).col(0);
}

DenseDenoiser train_denoiser(const Mat& samples, const NoiseSchedule& sched,
                             Objective obj, const DenoiserTrainConfig& cfg,
                             TrainLog* log) {
  const int d = static_cast<int>(samples.rows());
  const int n = static_cast<int>(samples.cols());
  require(n >= 2, "train_denoiser: need at least two samples");
  require(cfg.batch >= 1 && cfg.epochs >= 1, "train_denoiser: bad config");

  DenseDenoiser model(d, obj, cfg.pe_octaves, cfg.hidden,
                      derive_seed(cfg.seed, "denoiser_init"));
  Adam opt(model.net().n_params(), cfg.lr);
  Vec grad = Vec::Zero(model.net().n_params());
  Vec ema = model.net().params();

  if (log) log->epoch_loss.clear();
  Rng order_rng(derive_seed(cfg.seed, "denoiser_order"));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Decay the rate to zero so the optimizer noise ball collapses; the
    // score amplifies epsilon-error by 1/sqrt(1-alpha), so the tail of
    // training has to be quiet.
    double frac = cfg.epochs > 1 ? static_cast<double>(epoch) / (cfg.epochs - 1)
                                 : 0.0;
    opt.set_lr(cfg.lr * 0.5 * (1.0 + std::cos(frac * std::numbers::pi)));
    auto perm = order_rng.permutation(n);
    Rng noise(derive_seed(cfg.seed, "denoiser_noise", epoch));
    double epoch_loss = 0.0;
    int n_batches = 0;
    for (int start = 0; start < n; start += cfg.batch) {
      int B = std::min(cfg.batch, n - start);
      Mat X0(d, B);
      for (int j = 0; j < B; ++j) X0.col(j) = samples.col(perm[start + j]);

      Vec taus(B), sa(B), sb(B);
      for (int j = 0; j < B; ++j) {
        taus[j] = noise.uniform(cfg.tau_min, 1.0);
        double a = sched.alpha(taus[j]);
        sa[j] = std::sqrt(a);
        sb[j] = std::sqrt(1.0 - a);
      }
      Mat eps = noise.normal_mat(d, B);
      Mat Xt = X0 * sa.asDiagonal() + eps * sb.asDiagonal();

      Mat target(d, B);
      if (obj == Objective::Eps) {
        target = eps;
      } else {
        // v = sqrt(alpha) eps - sqrt(1 - alpha) x0
        target = eps * sa.asDiagonal() - X0 * sb.asDiagonal();
      }

      Mlp::Cache cache;
      Mat pred = model.net().forward(model.encode(Xt, taus), &cache);
      Mat resid = pred - target;
      double loss = resid.squaredNorm() / (B * d);
      epoch_loss += loss;
      ++n_batches;

      grad.setZero();
      Mat dY = (2.0 / (B * d)) * resid;
      model.net().backward(dY, cache, grad);
      check_finite(grad, "train_denoiser: gradient");
      opt.step(model.net().params(), grad);
      if (cfg.ema_decay > 0.0)
        ema = cfg.ema_decay * ema + (1.0 - cfg.ema_decay) * model.net().params();
    }
    if (log) log->epoch_loss.push_back(epoch_loss / std::max(1, n_batches));
  }
  if (cfg.ema_decay > 0.0) model.net().params() = ema;
  if (log && !log->epoch_loss.empty()) log->final_loss = log->epoch_loss.back();
  return model;
}

Mat x0_from_prediction(Objective obj, const Mat& X_tau, const Mat& pred,
                       double alpha) {
  require(alpha > 1e-6 && alpha <= 1.0,
          "x0_from_prediction: alpha out of range");
  double sa = std::sqrt(alpha), sb = std::sqrt(1.0 - alpha);
  if (obj == Objective::Eps) return (X_tau - sb * pred) / sa;
  return sa * X_tau - sb * pred;
}

Mat predict_x0_batch(const DenseDenoiser& m, const NoiseSchedule& sched,
                     const Mat& X_tau, double tau) {
  Vec taus = Vec::Constant(X_tau.cols(), tau);
  Mat pred = m.predict_batch(X_tau, taus);
  return x0_from_prediction(m.objective(), X_tau, pred, sched.alpha(tau));
}

Vec predict_x0(const DenseDenoiser& m, const NoiseSchedule& sched,
               const Vec& x_tau, double tau) {
  return predict_x0_batch(m, sched, x_tau, tau).col(0);
}

Mat score_batch(const DenseDenoiser& m, const NoiseSchedule& sched,
                const Mat& X, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "score: alpha must lie in (0, 1)");
  double tau = sched.tau_for_alpha(alpha);
  Mat x0 = predict_x0_batch(m, sched, X, tau);
  return (std::sqrt(alpha) * x0 - X) / (1.0 - alpha);
}

Vec score(const DenseDenoiser& m, const NoiseSchedule& sched, const Vec& x,
          double alpha) {
  return score_batch(m, sched, x, alpha).col(0);
}

}  // namespace eqflow
