#include "eqflow/conv_denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eqflow/adam.hpp"
#include "eqflow/mlp.hpp"  // silu / silu_prime

namespace eqflow {

namespace {

// Feature maps are (channels) x (B*h*w), column (b, y, x) at
// b*h*w + y*w + x. Column matrices are (9*in_c) x (B*oh*ow) with row
// block (u*3 + v)*in_c for kernel offset (u, v).
void im2col(const Mat& F, int B, int h, int w, int stride, Mat& col) {
  const int C = static_cast<int>(F.rows());
  const int oh = h / stride, ow = w / stride;
  col.resize(9 * C, static_cast<Eigen::Index>(B) * oh * ow);
  for (int u = 0; u < 3; ++u) {
    for (int v = 0; v < 3; ++v) {
      int r0 = (u * 3 + v) * C;
      for (int b = 0; b < B; ++b) {
        for (int oy = 0; oy < oh; ++oy) {
          int iy = (oy * stride - 1 + u + h) % h;
          int dst_row = (b * oh + oy) * ow;
          int src_row = (b * h + iy) * w;
          if (stride == 1) {
            // contiguous runs of ix = (ox - 1 + v) mod w
            int shift = v - 1;  // ix = ox + shift
            int lo = std::max(0, -shift), hi = std::min(w, w - shift);
            if (lo > 0)  // wrapped head: ox in [0, lo), ix = ox + shift + w
              col.block(r0, dst_row, C, lo) =
                  F.block(0, src_row + shift + w, C, lo);
            col.block(r0, dst_row + lo, C, hi - lo) =
                F.block(0, src_row + lo + shift, C, hi - lo);
            if (hi < w)  // wrapped tail: ix = ox + shift - w
              col.block(r0, dst_row + hi, C, w - hi) =
                  F.block(0, src_row + hi + shift - w, C, w - hi);
          } else {
            for (int ox = 0; ox < ow; ++ox) {
              int ix = (ox * stride - 1 + v + w) % w;
              col.block(r0, dst_row + ox, C, 1) = F.col(src_row + ix);
            }
          }
        }
      }
    }
  }
}

void col2im_add(const Mat& dcol, int B, int h, int w, int stride, Mat& dF) {
  const int C = static_cast<int>(dF.rows());
  const int oh = h / stride, ow = w / stride;
  for (int u = 0; u < 3; ++u) {
    for (int v = 0; v < 3; ++v) {
      int r0 = (u * 3 + v) * C;
      for (int b = 0; b < B; ++b) {
        for (int oy = 0; oy < oh; ++oy) {
          int iy = (oy * stride - 1 + u + h) % h;
          int src_row = (b * oh + oy) * ow;
          int dst_row = (b * h + iy) * w;
          if (stride == 1) {
            int shift = v - 1;
            int lo = std::max(0, -shift), hi = std::min(w, w - shift);
            if (lo > 0)
              dF.block(0, dst_row + shift + w, C, lo) +=
                  dcol.block(r0, src_row, C, lo);
            dF.block(0, dst_row + lo + shift, C, hi - lo) +=
                dcol.block(r0, src_row + lo, C, hi - lo);
            if (hi < w)
              dF.block(0, dst_row + hi + shift - w, C, w - hi) +=
                  dcol.block(r0, src_row + hi, C, w - hi);
          } else {
            for (int ox = 0; ox < ow; ++ox) {
              int ix = (ox * stride - 1 + v + w) % w;
              dF.col(dst_row + ix) += dcol.block(r0, src_row + ox, C, 1);
            }
          }
        }
      }
    }
  }
}

Mat upsample2(const Mat& F, int B, int h, int w) {
  const int C = static_cast<int>(F.rows());
  Mat out(C, static_cast<Eigen::Index>(B) * 4 * h * w);
  const int H = 2 * h, W2 = 2 * w;
  for (int b = 0; b < B; ++b)
    for (int y = 0; y < H; ++y) {
      int src_row = (b * h + y / 2) * w;
      int dst_row = (b * H + y) * W2;
      for (int x = 0; x < W2; ++x)
        out.col(dst_row + x) = F.col(src_row + x / 2);
    }
  return out;
}

void downsample_add(const Mat& dUp, int B, int h, int w, Mat& dF) {
  // dF is (C, B*h*w); dUp covers the 2h x 2w upsampled maps
  const int H = 2 * h, W2 = 2 * w;
  for (int b = 0; b < B; ++b)
    for (int y = 0; y < H; ++y) {
      int dst_row = (b * h + y / 2) * w;
      int src_row = (b * H + y) * W2;
      for (int x = 0; x < W2; ++x)
        dF.col(dst_row + x / 2) += dUp.col(src_row + x);
    }
}

// Grid layout (channel-major planes per column) <-> feature layout.
Mat grids_to_features(const Mat& X, const Vec& taus, int c, int h, int w) {
  const int B = static_cast<int>(X.cols());
  const int hw = h * w;
  Mat F(c + 1, static_cast<Eigen::Index>(B) * hw);
  for (int b = 0; b < B; ++b) {
    for (int i = 0; i < c; ++i)
      F.block(i, static_cast<Eigen::Index>(b) * hw, 1, hw) =
          X.col(b).segment(static_cast<Eigen::Index>(i) * hw, hw).transpose();
    F.row(c).segment(static_cast<Eigen::Index>(b) * hw, hw)
        .setConstant(taus[b]);
  }
  return F;
}

Mat features_to_grids(const Mat& F, int c, int h, int w) {
  const int hw = h * w;
  const int B = static_cast<int>(F.cols()) / hw;
  Mat X(static_cast<Eigen::Index>(c) * hw, B);
  for (int b = 0; b < B; ++b)
    for (int i = 0; i < c; ++i)
      X.col(b).segment(static_cast<Eigen::Index>(i) * hw, hw) =
          F.block(i, static_cast<Eigen::Index>(b) * hw, 1, hw).transpose();
  return X;
}

}  // namespace

GridDenoiser::GridDenoiser(int channels, Objective obj, std::vector<int> widths,
                           std::uint64_t seed)
    : widths_(std::move(widths)), c_(channels), obj_(obj) {
  require(c_ >= 1, "GridDenoiser: channels must be >= 1");
  require(!widths_.empty(), "GridDenoiser: need at least one width");
  const int W = static_cast<int>(widths_.size());
  int in_c = c_ + 1;  // tau channel
  for (int i = 0; i < W; ++i) {
    layers_.push_back({in_c, widths_[i], i == 0 ? 1 : 2, false, false, 0, -1});
    in_c = widths_[i];
  }
  for (int i = W - 2; i >= 0; --i) {
    layers_.push_back(
        {in_c + widths_[i], widths_[i], 1, true, false, widths_[i], i});
    in_c = widths_[i];
  }
  layers_.push_back({in_c, c_, 1, false, true, 0, -1});

  int off = 0;
  for (const Layer& l : layers_) {
    w_off_.push_back(off);
    off += l.out_c * 9 * l.in_c;
    b_off_.push_back(off);
    off += l.out_c;
  }
  theta_ = Vec::Zero(off);
  Rng rng(derive_seed(seed, "grid_init"));
  for (size_t l = 0; l < layers_.size(); ++l) {
    double std = std::sqrt(2.0 / (9.0 * layers_[l].in_c));
    int nw = layers_[l].out_c * 9 * layers_[l].in_c;
    for (int i = 0; i < nw; ++i) theta_[w_off_[l] + i] = std * rng.normal();
  }
}

int GridDenoiser::stride_factor() const {
  return 1 << (static_cast<int>(widths_.size()) - 1);
}

Eigen::Map<const Mat> GridDenoiser::W(int l) const {
  return {theta_.data() + w_off_[l], layers_[l].out_c, 9 * layers_[l].in_c};
}

Eigen::Map<const Vec> GridDenoiser::b(int l) const {
  return {theta_.data() + b_off_[l], layers_[l].out_c};
}

Mat GridDenoiser::predict_batch(const Mat& X, const Vec& taus, int h, int w,
                                Cache* cache) const {
  const int B = static_cast<int>(X.cols());
  require(B >= 1, "GridDenoiser: empty batch");
  require(taus.size() == B, "GridDenoiser: tau count mismatch");
  require(X.rows() == static_cast<Eigen::Index>(c_) * h * w,
          "GridDenoiser: flattened grid size mismatch");
  int f = stride_factor();
  require(h % f == 0 && w % f == 0 && h >= f && w >= f,
          "GridDenoiser: h and w must be divisible by the stride factor");

  Mat F = grids_to_features(X, taus, c_, h, w);
  if (cache) {
    cache->B = B;
    cache->h = h;
    cache->w = w;
    cache->inputs.assign(layers_.size(), Mat());
    cache->pre.assign(layers_.size(), Mat());
  }
  int ch = h, cw = w;
  Mat col;
  std::vector<Mat> enc(widths_.size());
  for (size_t l = 0; l < layers_.size(); ++l) {
    const Layer& L = layers_[l];
    if (L.pre_up) {
      Mat up = upsample2(F, B, ch, cw);
      ch *= 2;
      cw *= 2;
      F.resize(L.in_c, up.cols());
      F.topRows(up.rows()) = up;
      F.bottomRows(L.skip_c) = enc[L.skip_from];
    }
    if (cache) cache->inputs[l] = F;
    im2col(F, B, ch, cw, L.stride, col);
    ch /= L.stride;
    cw /= L.stride;
    Mat Z = W(static_cast<int>(l)) * col;
    Z.colwise() += b(static_cast<int>(l));
    if (cache && !L.linear) cache->pre[l] = Z;
    F = L.linear ? std::move(Z) : silu(Z);
    if (l < enc.size()) enc[l] = F;
  }
  return features_to_grids(F, c_, h, w);
}

Grid GridDenoiser::predict(const Grid& g, double tau) const {
  require(g.c == c_, "GridDenoiser: channel mismatch");
  Vec taus(1);
  taus << tau;
  Grid out = g;
  out.data = predict_batch(g.data, taus, g.h, g.w).col(0);
  return out;
}

void GridDenoiser::backward(const Mat& dY, const Cache& cache,
                            Vec& grad) const {
  require(grad.size() == theta_.size(), "GridDenoiser: bad grad size");
  const int B = cache.B;
  // dimensions entering each conv (post-upsample) and leaving it
  std::vector<int> hin(layers_.size()), win(layers_.size());
  int ch = cache.h, cw = cache.w;
  for (size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].pre_up) {
      ch *= 2;
      cw *= 2;
    }
    hin[l] = ch;
    win[l] = cw;
    ch /= layers_[l].stride;
    cw /= layers_[l].stride;
  }

  Mat dF = grids_to_features(dY, Vec::Zero(B), c_, cache.h, cache.w)
               .topRows(c_);  // strip the unused tau row
  Mat col;
  std::vector<Mat> pending(widths_.size());  // skip grads per encoder layer
  for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
    const Layer& L = layers_[l];
    if (l < static_cast<int>(pending.size()) && pending[l].size() > 0)
      dF += pending[l];
    Mat dZ;
    if (L.linear)
      dZ = std::move(dF);
    else
      dZ = (dF.array() * silu_prime(cache.pre[l]).array()).matrix();
    im2col(cache.inputs[l], B, hin[l], win[l], L.stride, col);
    Eigen::Map<Mat> gW(grad.data() + w_off_[l], L.out_c, 9 * L.in_c);
    gW.noalias() += dZ * col.transpose();
    Eigen::Map<Vec> gb(grad.data() + b_off_[l], L.out_c);
    gb += dZ.rowwise().sum();
    if (l == 0) break;
    Mat dcol = W(l).transpose() * dZ;
    Mat dIn =
        Mat::Zero(L.in_c, static_cast<Eigen::Index>(B) * hin[l] * win[l]);
    col2im_add(dcol, B, hin[l], win[l], L.stride, dIn);
    if (L.pre_up) {
      pending[L.skip_from] = dIn.bottomRows(L.skip_c);
      dF = Mat::Zero(L.in_c - L.skip_c,
                     static_cast<Eigen::Index>(B) * hin[l] * win[l] / 4);
      downsample_add(dIn.topRows(L.in_c - L.skip_c), B, hin[l] / 2,
                     win[l] / 2, dF);
    } else {
      dF = std::move(dIn);
    }
  }
}

GridDenoiser train_grid_denoiser(const std::vector<Grid>& samples,
                                 const NoiseSchedule& sched, Objective obj,
                                 const GridTrainConfig& cfg, TrainLog* log) {
  const int n = static_cast<int>(samples.size());
  require(n >= 2, "train_grid_denoiser: need at least two samples");
  require(cfg.batch >= 1 && cfg.epochs >= 1, "train_grid_denoiser: bad config");
  const int c = samples[0].c, h = samples[0].h, w = samples[0].w;
  const int chw = c * h * w;
  Mat D(chw, n);
  for (int i = 0; i < n; ++i) {
    require(samples[i].c == c && samples[i].h == h && samples[i].w == w,
            "train_grid_denoiser: samples must share one shape");
    D.col(i) = samples[i].data;
  }

  GridDenoiser model(c, obj, cfg.widths, cfg.seed);
  Adam opt(model.n_params(), cfg.lr);
  Vec grad = Vec::Zero(model.n_params());
  Vec ema = model.params();

  if (log) log->epoch_loss.clear();
  Rng order_rng(derive_seed(cfg.seed, "grid_order"));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double frac = cfg.epochs > 1 ? static_cast<double>(epoch) / (cfg.epochs - 1)
                                 : 0.0;
    opt.set_lr(cfg.lr * 0.5 * (1.0 + std::cos(frac * std::numbers::pi)));
    auto perm = order_rng.permutation(n);
    Rng noise(derive_seed(cfg.seed, "grid_noise", epoch));
    double epoch_loss = 0.0;
    int n_batches = 0;
    for (int start = 0; start < n; start += cfg.batch) {
      int B = std::min(cfg.batch, n - start);
      Mat X0(chw, B);
      for (int j = 0; j < B; ++j) X0.col(j) = D.col(perm[start + j]);

      Vec taus(B), sa(B), sb(B);
      for (int j = 0; j < B; ++j) {
        taus[j] = noise.uniform(cfg.tau_min, 1.0);
        double a = sched.alpha(taus[j]);
        sa[j] = std::sqrt(a);
        sb[j] = std::sqrt(1.0 - a);
      }
      Mat eps = noise.normal_mat(chw, B);
      Mat Xt = X0 * sa.asDiagonal() + eps * sb.asDiagonal();
      Mat target = obj == Objective::Eps
                       ? std::move(eps)
                       : Mat(eps * sa.asDiagonal() - X0 * sb.asDiagonal());

      GridDenoiser::Cache cache;
      Mat pred = model.predict_batch(Xt, taus, h, w, &cache);
      Mat resid = pred - target;
      double loss = resid.squaredNorm() / (static_cast<double>(B) * chw);
      epoch_loss += loss;
      ++n_batches;

      grad.setZero();
      Mat dY = (2.0 / (static_cast<double>(B) * chw)) * resid;
      model.backward(dY, cache, grad);
      check_finite(grad, "train_grid_denoiser: gradient");
      opt.step(model.params(), grad);
      if (cfg.ema_decay > 0.0)
        ema = cfg.ema_decay * ema + (1.0 - cfg.ema_decay) * model.params();
    }
    if (log) log->epoch_loss.push_back(epoch_loss / std::max(1, n_batches));
  }
  if (cfg.ema_decay > 0.0) model.params() = ema;
  if (log && !log->epoch_loss.empty()) log->final_loss = log->epoch_loss.back();
  return model;
}

Grid grid_score(const GridDenoiser& m, const NoiseSchedule& sched,
                const Grid& x, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "grid_score: alpha must lie in (0, 1)");
  double tau = sched.tau_for_alpha(alpha);
  Grid pred = m.predict(x, tau);
  Mat x0 = x0_from_prediction(m.objective(), x.data, pred.data, alpha);
  Grid s = x;
  s.data = (std::sqrt(alpha) * x0 - x.data) / (1.0 - alpha);
  return s;
}

}  // namespace eqflow
