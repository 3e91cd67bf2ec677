#pragma once

#include <variant>
#include <vector>

#include "eqflow/grid.hpp"
#include "eqflow/rng.hpp"

namespace eqflow {

// c x c bank of (2r+1) x (2r+1) taps applied with wrap-around:
// out[o](p) = sum_{i,u,v} K[o,i](u,v) * in[i](p - (u,v)).
struct ConvKernel {
  int c = 0, r = 0;
  std::vector<Mat> taps;  // taps[o * c + i], indexed (u + r, v + r)

  ConvKernel() = default;
  ConvKernel(int c_, int r_)
      : c(c_), r(r_), taps(c_ * c_, Mat::Zero(2 * r_ + 1, 2 * r_ + 1)) {}

  double& at(int o, int i, int u, int v) { return taps[o * c + i](u + r, v + r); }
  double at(int o, int i, int u, int v) const {
    return taps[o * c + i](u + r, v + r);
  }
};

// A linear operator applied to the score: either a dense d x d matrix or
// a wrap-around convolution kernel. gamma records the orientation/speed
// scalar already folded into the entries.
struct SkewOperator {
  std::variant<Mat, ConvKernel> form;
  double gamma = 1.0;

  static SkewOperator dense(Mat S, double gamma = 1.0);
  static SkewOperator conv(ConvKernel k, double gamma = 1.0);

  bool is_dense() const { return std::holds_alternative<Mat>(form); }
  const Mat& dense_matrix() const;
  const ConvKernel& kernel() const;
};

// 1x1 two-channel rotation kernel gamma * [[0, -1], [1, 0]].
SkewOperator make_rotation_kernel(double gamma);

// Single-channel central-difference stencil gy * d/dy + gx * d/dx,
// radius 1, antisymmetric by construction; drives translation flows.
SkewOperator make_translation_kernel(double gy, double gx);

// Exact check of the skew condition: dense S + S^T = 0 element-wise;
// conv K[o,i,u,v] = -K[i,o,-u,-v] for all indices.
bool validate_skew(const SkewOperator& op);

// Block-circulant densification of a conv kernel on an h x w periodic
// grid (requires h, w >= 2r+1 so displacements are unambiguous).
Mat conv_to_dense(const ConvKernel& k, int h, int w);

Vec v_skew(const SkewOperator& op, const Vec& s);     // dense form
Grid v_skew(const SkewOperator& op, const Grid& s);   // conv form
Grid apply_kernel(const ConvKernel& k, const Grid& s);

// Skew projections; exact in floating point (difference and halving).
Mat antisymmetrize(const Mat& A);
ConvKernel antisymmetrize(const ConvKernel& k);

// Random draws: valid skew operators via projection, and unconstrained
// kernels for the random-K baseline.
Mat random_skew_dense(int d, Rng& rng);
ConvKernel random_valid_kernel(int c, int r, Rng& rng);
ConvKernel random_kernel(int c, int r, Rng& rng);

}  // namespace eqflow
