#pragma once

#include <cstdint>
#include <vector>

#include "eqflow/common.hpp"

namespace eqflow {

inline Mat silu(const Mat& z) {
  return (z.array() / (1.0 + (-z.array()).exp())).matrix();
}

inline Mat silu_prime(const Mat& z) {
  auto s = 1.0 / (1.0 + (-z.array()).exp());
  return (s * (1.0 + z.array() * (1.0 - s))).matrix();
}

// Fully connected network with SiLU hidden activations and a linear
// output layer. Parameters live in one flat vector so optimizers can
// treat the model as a single array; per-layer weights are exposed as
// Eigen maps over that vector (column-major in memory).
class Mlp {
 public:
  struct Cache {
    std::vector<Mat> a;  // a[l] = input to layer l, l = 0..L-1
    std::vector<Mat> z;  // z[l] = pre-activation of layer l, l = 0..L-2
  };

  Mlp() = default;
  // widths = {in, hidden..., out}; He-style init seeded by init_seed.
  Mlp(std::vector<int> widths, std::uint64_t init_seed);

  int n_layers() const { return static_cast<int>(widths_.size()) - 1; }
  const std::vector<int>& widths() const { return widths_; }
  int in_dim() const { return widths_.front(); }
  int out_dim() const { return widths_.back(); }

  Eigen::Map<Mat> W(int l);
  Eigen::Map<const Mat> W(int l) const;
  Eigen::Map<Vec> b(int l);
  Eigen::Map<const Vec> b(int l) const;

  Vec& params() { return theta_; }
  const Vec& params() const { return theta_; }
  int n_params() const { return static_cast<int>(theta_.size()); }

  // Forward over a batch (columns). If cache is non-null it is filled
  // for a later backward pass over the same batch.
  Mat forward(const Mat& X, Cache* cache = nullptr) const;

  // Accumulates d(loss)/d(theta) into grad given the cotangent dY on
  // the output of the forward pass that produced cache.
  void backward(const Mat& dY, const Cache& cache, Vec& grad) const;

  // Forward-mode: primal output at x plus J(x) * T for tangent columns T.
  void forward_jvp(const Vec& x, const Mat& T, Vec* y, Mat* JT) const;

  // Grad layout mirrors params(); these expose per-layer views of a
  // flat gradient vector.
  Eigen::Map<Mat> grad_W(Vec& grad, int l) const;
  Eigen::Map<Vec> grad_b(Vec& grad, int l) const;

 private:
  std::vector<int> widths_;
  std::vector<int> w_off_, b_off_;
  Vec theta_;
};

}  // namespace eqflow
