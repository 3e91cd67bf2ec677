#pragma once

#include "eqflow/common.hpp"

namespace eqflow {

// Octave-major Fourier features: for each octave k = 0..n_octaves the
// block [sin(2^k x); cos(2^k x)] is appended, so the output has
// 2 * d * (n_octaves + 1) rows.
inline Vec positional_encode(const Vec& x, int n_octaves) {
  require(n_octaves >= 0, "positional_encode: n_octaves must be >= 0");
  const int d = static_cast<int>(x.size());
  Vec e(2 * d * (n_octaves + 1));
  double scale = 1.0;
  for (int k = 0; k <= n_octaves; ++k) {
    for (int i = 0; i < d; ++i) e[2 * d * k + i] = std::sin(scale * x[i]);
    for (int i = 0; i < d; ++i) e[2 * d * k + d + i] = std::cos(scale * x[i]);
    scale *= 2.0;
  }
  return e;
}

// Batched variant plus the identity passthrough: rows are
// [X; sin(2^0 X); cos(2^0 X); ...]. This is the standard network input.
inline Mat encode_with_input(const Mat& X, int n_octaves) {
  const int d = static_cast<int>(X.rows());
  const int B = static_cast<int>(X.cols());
  Mat E(d + 2 * d * (n_octaves + 1), B);
  E.topRows(d) = X;
  double scale = 1.0;
  for (int k = 0; k <= n_octaves; ++k) {
    E.middleRows(d + 2 * d * k, d) = (scale * X.array()).sin().matrix();
    E.middleRows(d + 2 * d * k + d, d) = (scale * X.array()).cos().matrix();
    scale *= 2.0;
  }
  return E;
}

// Tangent of encode_with_input at X applied to T (same shape as X).
inline Mat encode_with_input_jvp(const Mat& X, const Mat& T, int n_octaves) {
  const int d = static_cast<int>(X.rows());
  const int B = static_cast<int>(X.cols());
  Mat E(d + 2 * d * (n_octaves + 1), B);
  E.topRows(d) = T;
  double scale = 1.0;
  for (int k = 0; k <= n_octaves; ++k) {
    E.middleRows(d + 2 * d * k, d) =
        (scale * (scale * X.array()).cos() * T.array()).matrix();
    E.middleRows(d + 2 * d * k + d, d) =
        (-scale * (scale * X.array()).sin() * T.array()).matrix();
    scale *= 2.0;
  }
  return E;
}

inline int encoded_dim(int d, int n_octaves) {
  return d + 2 * d * (n_octaves + 1);
}

}  // namespace eqflow
