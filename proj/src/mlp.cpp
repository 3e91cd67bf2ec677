#include "eqflow/mlp.hpp"

#include <cmath>

#include "eqflow/rng.hpp"

namespace eqflow {

Mlp::Mlp(std::vector<int> widths, std::uint64_t init_seed)
    : widths_(std::move(widths)) {
  require(widths_.size() >= 2, "Mlp: need at least input and output widths");
  int total = 0;
  for (int l = 0; l < n_layers(); ++l) {
    w_off_.push_back(total);
    total += widths_[l + 1] * widths_[l];
    b_off_.push_back(total);
    total += widths_[l + 1];
  }
  theta_ = Vec::Zero(total);
  Rng rng(derive_seed(init_seed, "mlp_init"));
  for (int l = 0; l < n_layers(); ++l) {
    double scale = std::sqrt(2.0 / widths_[l]);
    auto w = W(l);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = scale * rng.normal();
  }
}

Eigen::Map<Mat> Mlp::W(int l) {
  return {theta_.data() + w_off_[l], widths_[l + 1], widths_[l]};
}
Eigen::Map<const Mat> Mlp::W(int l) const {
  return {theta_.data() + w_off_[l], widths_[l + 1], widths_[l]};
}
Eigen::Map<Vec> Mlp::b(int l) {
  return {theta_.data() + b_off_[l], widths_[l + 1]};
}
Eigen::Map<const Vec> Mlp::b(int l) const {
  return {theta_.data() + b_off_[l], widths_[l + 1]};
}
Eigen::Map<Mat> Mlp::grad_W(Vec& grad, int l) const {
  return {grad.data() + w_off_[l], widths_[l + 1], widths_[l]};
}
Eigen::Map<Vec> Mlp::grad_b(Vec& grad, int l) const {
  return {grad.data() + b_off_[l], widths_[l + 1]};
}

Mat Mlp::forward(const Mat& X, Cache* cache) const {
  require(X.rows() == in_dim(), "Mlp::forward: input width mismatch");
  const int L = n_layers();
  if (cache) {
    cache->a.assign(L, Mat());
    cache->z.assign(L - 1, Mat());
  }
  Mat a = X;
  for (int l = 0; l < L; ++l) {
    if (cache) cache->a[l] = a;
    Mat z = (W(l) * a).colwise() + b(l);
    if (l + 1 < L) {
      if (cache) cache->z[l] = z;
      a = silu(z);
    } else {
      a = std::move(z);
    }
  }
  return a;
}

void Mlp::backward(const Mat& dY, const Cache& cache, Vec& grad) const {
  const int L = n_layers();
  Mat delta = dY;
  for (int l = L - 1; l >= 0; --l) {
    grad_W(grad, l).noalias() += delta * cache.a[l].transpose();
    grad_b(grad, l).noalias() += delta.rowwise().sum();
    if (l > 0) {
      Mat back = W(l).transpose() * delta;
      delta = back.cwiseProduct(silu_prime(cache.z[l - 1]));
    }
  }
}

void Mlp::forward_jvp(const Vec& x, const Mat& T, Vec* y, Mat* JT) const {
  require(x.size() == in_dim() && T.rows() == in_dim(),
          "Mlp::forward_jvp: input width mismatch");
  const int L = n_layers();
  Vec a = x;
  Mat t = T;
  for (int l = 0; l < L; ++l) {
    Vec z = W(l) * a + b(l);
    t = W(l) * t;
    if (l + 1 < L) {
      Vec sp = silu_prime(z);
      a = silu(z);
      t = sp.asDiagonal() * t;
    } else {
      a = std::move(z);
    }
  }
  if (y) *y = a;
  if (JT) *JT = t;
}

}  // namespace eqflow
