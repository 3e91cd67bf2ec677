#include "eqflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "eqflow/adam.hpp"
#include "eqflow/positional.hpp"

namespace eqflow {

static double point_divergence(const VelocityField& f, const Vec& x,
                               const FlowTrainConfig& cfg, Rng* probe_rng) {
  switch (cfg.div_mode) {
    case DivMode::Exact:
      return divergence_exact(f, x);
    case DivMode::Fd:
      return divergence_fd(f, x, cfg.fd_h);
    case DivMode::Hutchinson:
      require(probe_rng != nullptr,
              "loss_batch: hutchinson mode needs a probe rng");
      return divergence_hutchinson(f, x, cfg.k_probes, *probe_rng,
                                   cfg.hutch_h);
  }
  throw InputError("loss_batch: unknown div mode");
}

double loss_batch(const VelocityField& v, const VelocityField& score_field,
                  const Mat& batch, const FlowTrainConfig& cfg,
                  Rng* probe_rng) {
  require(batch.cols() >= 2, "loss_batch: need at least two points");
  require(batch.rows() == v.dim(), "loss_batch: dimension mismatch");
  const int B = static_cast<int>(batch.cols());
  double sum = 0.0;
  for (int j = 0; j < B; ++j) {
    Vec x = batch.col(j);
    double res = residual(v.eval(x), point_divergence(v, x, cfg, probe_rng),
                          score_field.eval(x));
    sum += res * res;
  }
  double loss = sum / B;
  if (!std::isfinite(loss)) throw NumericalError("loss_batch: non-finite loss");
  return loss;
}

ResidualReport residual_report(const VelocityField& v,
                               const VelocityField& score_field,
                               const Mat& batch, const FlowTrainConfig& cfg,
                               Rng* probe_rng) {
  require(batch.cols() >= 2, "residual_report: need at least two points");
  const int B = static_cast<int>(batch.cols());
  ResidualReport rep;
  rep.per_sample = Vec(B);
  double sq = 0.0, speed = 0.0;
  for (int j = 0; j < B; ++j) {
    Vec x = batch.col(j);
    Vec vx = v.eval(x);
    double res = residual(vx, point_divergence(v, x, cfg, probe_rng),
                          score_field.eval(x));
    rep.per_sample[j] = res;
    sq += res * res;
    speed += vx.norm();
  }
  rep.mean_sq_residual = sq / B;
  rep.mean_speed = speed / B;
  rep.trivial = rep.mean_speed < 0.1;
  check_finite(rep.per_sample, "residual_report: residuals");
  return rep;
}

double flow_objective(const VelocityNetwork& net, const Mat& X, const Mat& S,
                      const FlowTrainConfig& cfg, const Mat* Z, Vec* grad,
                      VelocityNetwork::BatchStats* stats) {
  const int d = net.dim();
  const int B = static_cast<int>(X.cols());
  require(X.rows() == d && S.rows() == d && S.cols() == B,
          "flow_objective: shape mismatch");
  require(B >= 2, "flow_objective: output normalization needs B >= 2");
  const bool hutch = cfg.div_mode == DivMode::Hutchinson;
  require(cfg.div_mode == DivMode::Fd || hutch,
          "flow_objective: div_mode must be fd or hutchinson");
  const int m = hutch ? cfg.k_probes : d;  // stencil directions per point
  const double h = hutch ? cfg.hutch_h : cfg.fd_h;
  require(h > 0.0, "flow_objective: stencil step must be positive");
  if (hutch)
    require(Z != nullptr && Z->rows() == d && Z->cols() == B * m,
            "flow_objective: bad probe matrix");

  // Stencil layout: [X | +probe 0 | -probe 0 | ... | +probe m-1 | -probe m-1].
  Mat Xall(d, B * (1 + 2 * m));
  Xall.leftCols(B) = X;
  for (int p = 0; p < m; ++p) {
    Mat dir = hutch ? Mat(Z->middleCols(p * B, B))
                    : Mat(Vec::Unit(d, p).replicate(1, B));
    Xall.middleCols(B * (1 + 2 * p), B) = X + h * dir;
    Xall.middleCols(B * (2 + 2 * p), B) = X - h * dir;
  }

  Mlp::Cache cache;
  Mat R = net.net().forward(encode_with_input(Xall, net.pe_octaves()),
                            grad ? &cache : nullptr);

  // Every column is normalized with the unperturbed batch's statistics.
  auto st = VelocityNetwork::batch_stats(R.leftCols(B));
  if (stats) *stats = st;
  const Vec& g = st.inv_std;
  Mat V = (R.leftCols(B).colwise() - st.mean).array().colwise() * g.array();

  Vec res(B);
  for (int j = 0; j < B; ++j) {
    double div = 0.0;
    for (int p = 0; p < m; ++p) {
      int cp = B * (1 + 2 * p) + j, cm = B * (2 + 2 * p) + j;
      if (hutch) {
        Vec diff = (R.col(cp) - R.col(cm)).cwiseProduct(g);
        div += Z->col(p * B + j).dot(diff) / (2.0 * h * m);
      } else {
        div += g[p] * (R(p, cp) - R(p, cm)) / (2.0 * h);
      }
    }
    res[j] = div + V.col(j).dot(S.col(j));
  }
  double loss = res.squaredNorm() / B;
  if (!grad) return loss;

  // Cotangents on the normalized outputs of every column.
  Mat dV = Mat::Zero(d, B * (1 + 2 * m));
  for (int j = 0; j < B; ++j) {
    double c = 2.0 * res[j] / B;
    dV.col(j) = c * S.col(j);
    for (int p = 0; p < m; ++p) {
      int cp = B * (1 + 2 * p) + j, cm = B * (2 + 2 * p) + j;
      if (hutch) {
        Vec zc = (c / (2.0 * h * m)) * Z->col(p * B + j);
        dV.col(cp) = zc;
        dV.col(cm) = -zc;
      } else {
        dV(p, cp) = c / (2.0 * h);
        dV(p, cm) = -c / (2.0 * h);
      }
    }
  }

  // Backward through the shared normalization: the direct term applies
  // to all columns, the mean/variance corrections only to the columns
  // that produced the statistics.
  Mat Y = R.colwise() - st.mean;
  Mat dR = dV.array().colwise() * g.array();
  Vec dmu = -(dV.rowwise().sum().cwiseProduct(g));
  Vec g3 = g.array().cube();
  Vec dvar =
      -0.5 * g3.cwiseProduct((dV.array() * Y.array()).rowwise().sum().matrix());
  dR.leftCols(B).colwise() += (1.0 / B) * dmu;
  dR.leftCols(B) +=
      (2.0 / B) * (Y.leftCols(B).array().colwise() * dvar.array()).matrix();
  net.net().backward(dR, cache, *grad);
  return loss;
}

FlowTrainResult train_flow(const Mat& samples,
                           const VelocityField& score_field,
                           const FlowTrainConfig& cfg) {
  const int d = static_cast<int>(samples.rows());
  const int n = static_cast<int>(samples.cols());
  require(d == score_field.dim(), "train_flow: score dimension mismatch");
  require(n >= 2, "train_flow: need at least two samples");
  require(cfg.batch >= 2, "train_flow: output normalization needs batch >= 2");
  require(cfg.epochs >= 1, "train_flow: bad epoch count");
  require(cfg.alpha > 0.0 && cfg.alpha <= 1.0, "train_flow: alpha out of range");
  if (cfg.div_mode == DivMode::Exact)
    throw InputError(
        "train_flow: div_mode=exact is evaluation-only; train with fd or "
        "hutchinson");
  const bool hutch = cfg.div_mode == DivMode::Hutchinson;
  if (hutch) require(cfg.k_probes >= 1, "train_flow: k_probes must be >= 1");

  VelocityNetConfig ncfg;
  ncfg.dim = d;
  ncfg.pe_octaves = cfg.pe_octaves;
  ncfg.hidden = cfg.hidden;
  ncfg.seed = derive_seed(cfg.seed, "flow_init");
  FlowTrainResult out{VelocityNetwork(ncfg), {}, {}};
  VelocityNetwork& net = out.net;

  Adam opt(net.net().n_params(), cfg.lr);
  Vec grad = Vec::Zero(net.net().n_params());
  const double sa = std::sqrt(cfg.alpha), sb = std::sqrt(1.0 - cfg.alpha);

  Rng order_rng(derive_seed(cfg.seed, "flow_order"));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // cosine decay to zero, as in the denoiser trainer
    double frac = cfg.epochs > 1 ? static_cast<double>(epoch) / (cfg.epochs - 1)
                                 : 0.0;
    opt.set_lr(cfg.lr * 0.5 * (1.0 + std::cos(frac * std::numbers::pi)));
    auto perm = order_rng.permutation(n);
    Rng noise(derive_seed(cfg.seed, "flow_noise", epoch));
    double epoch_loss = 0.0;
    int n_batches = 0;
    for (int start = 0, bi = 0; start < n; start += cfg.batch, ++bi) {
      int B = std::min(cfg.batch, n - start);
      if (B < 2) break;  // a trailing single point cannot be normalized

      Mat X0(d, B);
      for (int j = 0; j < B; ++j) X0.col(j) = samples.col(perm[start + j]);
      Mat eps = noise.normal_mat(d, B);
      Mat X = sa * X0 + sb * eps;
      Mat S = score_field.eval_batch(X);  // fixed teacher, no gradient

      Mat Z;
      if (hutch) {
        Rng probe_rng(derive_seed(cfg.seed, "flow_probes", epoch, bi));
        Z = probe_rng.normal_mat(d, B * cfg.k_probes);
      }
      VelocityNetwork::BatchStats st;
      grad.setZero();
      double loss =
          flow_objective(net, X, S, cfg, hutch ? &Z : nullptr, &grad, &st);
      if (!std::isfinite(loss))
        throw NumericalError("train_flow: non-finite loss at epoch " +
                             std::to_string(epoch) + ", batch " +
                             std::to_string(bi));
      check_finite(grad, "train_flow: gradient");
      epoch_loss += loss;
      ++n_batches;
      opt.step(net.net().params(), grad);
      net.update_running(st);
    }
    out.log.epoch_loss.push_back(epoch_loss / std::max(1, n_batches));
  }
  if (!out.log.epoch_loss.empty())
    out.log.final_loss = out.log.epoch_loss.back();

  // Final report on a deterministic diffused draw of the dataset.
  int nr = std::min(n, 2048);
  Rng rep_noise(derive_seed(cfg.seed, "flow_report"));
  Mat Xr = sa * samples.leftCols(nr) + sb * rep_noise.normal_mat(d, nr);
  Rng rep_probes(derive_seed(cfg.seed, "flow_report_probes"));
  out.report = residual_report(net, score_field, Xr, cfg, &rep_probes);
  return out;
}

FlowTrainResult train_flow(const Mat& samples, const DenseDenoiser& score_model,
                           const NoiseSchedule& sched,
                           const FlowTrainConfig& cfg) {
  ScoreField teacher(score_model, sched, cfg.alpha);
  return train_flow(samples, teacher, cfg);
}

}  // namespace eqflow
