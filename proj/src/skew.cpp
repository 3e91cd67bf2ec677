#include "eqflow/skew.hpp"

namespace eqflow {

SkewOperator SkewOperator::dense(Mat S, double gamma) {
  require(S.rows() == S.cols(), "SkewOperator: dense form must be square");
  return {std::move(S), gamma};
}

SkewOperator SkewOperator::conv(ConvKernel k, double gamma) {
  return {std::move(k), gamma};
}

const Mat& SkewOperator::dense_matrix() const {
  require(is_dense(), "SkewOperator: not in dense form");
  return std::get<Mat>(form);
}

const ConvKernel& SkewOperator::kernel() const {
  require(!is_dense(), "SkewOperator: not in conv form");
  return std::get<ConvKernel>(form);
}

SkewOperator make_rotation_kernel(double gamma) {
  require(gamma != 0.0, "make_rotation_kernel: gamma must be nonzero");
  ConvKernel k(2, 0);
  k.at(0, 1, 0, 0) = -gamma;
  k.at(1, 0, 0, 0) = gamma;
  return SkewOperator::conv(std::move(k), gamma);
}

SkewOperator make_translation_kernel(double gy, double gx) {
  require(gy != 0.0 || gx != 0.0, "make_translation_kernel: zero kernel");
  ConvKernel k(1, 1);
  k.at(0, 0, -1, 0) = gy / 2.0;
  k.at(0, 0, 1, 0) = -gy / 2.0;
  k.at(0, 0, 0, -1) = gx / 2.0;
  k.at(0, 0, 0, 1) = -gx / 2.0;
  return SkewOperator::conv(std::move(k), std::hypot(gy, gx));
}

bool validate_skew(const SkewOperator& op) {
  if (op.is_dense()) {
    const Mat& S = op.dense_matrix();
    return ((S + S.transpose()).array() == 0.0).all();
  }
  const ConvKernel& k = op.kernel();
  for (int o = 0; o < k.c; ++o)
    for (int i = 0; i < k.c; ++i)
      for (int u = -k.r; u <= k.r; ++u)
        for (int v = -k.r; v <= k.r; ++v)
          if (k.at(o, i, u, v) != -k.at(i, o, -u, -v)) return false;
  return true;
}

namespace {
// Maps a wrapped displacement to the unique tap in [-r, r], or returns
// false when the kernel has no tap at that displacement.
bool tap_offset(int delta, int period, int r, int* out) {
  int m = ((delta % period) + period) % period;
  if (m <= r) {
    *out = m;
    return true;
  }
  if (m - period >= -r) {
    *out = m - period;
    return true;
  }
  return false;
}
}  // namespace

Mat conv_to_dense(const ConvKernel& k, int h, int w) {
  require(h >= 2 * k.r + 1 && w >= 2 * k.r + 1,
          "conv_to_dense: grid smaller than kernel support");
  const int n = h * w;
  Mat S = Mat::Zero(k.c * n, k.c * n);
  for (int o = 0; o < k.c; ++o)
    for (int i = 0; i < k.c; ++i)
      for (int py = 0; py < h; ++py)
        for (int px = 0; px < w; ++px)
          for (int qy = 0; qy < h; ++qy)
            for (int qx = 0; qx < w; ++qx) {
              int u, v;
              if (!tap_offset(py - qy, h, k.r, &u)) continue;
              if (!tap_offset(px - qx, w, k.r, &v)) continue;
              S(o * n + py * w + px, i * n + qy * w + qx) = k.at(o, i, u, v);
            }
  return S;
}

Vec v_skew(const SkewOperator& op, const Vec& s) {
  const Mat& S = op.dense_matrix();
  require(S.cols() == s.size(), "v_skew: dimension mismatch");
  return S * s;
}

Grid apply_kernel(const ConvKernel& k, const Grid& s) {
  require(s.c == k.c, "apply_kernel: channel mismatch");
  Grid out(s.c, s.h, s.w);
  for (int o = 0; o < k.c; ++o)
    for (int i = 0; i < k.c; ++i)
      for (int u = -k.r; u <= k.r; ++u)
        for (int v = -k.r; v <= k.r; ++v) {
          double kv = k.at(o, i, u, v);
          if (kv == 0.0) continue;
          for (int y = 0; y < s.h; ++y) {
            int sy = ((y - u) % s.h + s.h) % s.h;
            for (int x = 0; x < s.w; ++x) {
              int sx = ((x - v) % s.w + s.w) % s.w;
              out.at(o, y, x) += kv * s.at(i, sy, sx);
            }
          }
        }
  return out;
}

Grid v_skew(const SkewOperator& op, const Grid& s) {
  return apply_kernel(op.kernel(), s);
}

Mat antisymmetrize(const Mat& A) {
  require(A.rows() == A.cols(), "antisymmetrize: matrix must be square");
  return (A - A.transpose()) / 2.0;
}

ConvKernel antisymmetrize(const ConvKernel& k) {
  ConvKernel out(k.c, k.r);
  for (int o = 0; o < k.c; ++o)
    for (int i = 0; i < k.c; ++i)
      for (int u = -k.r; u <= k.r; ++u)
        for (int v = -k.r; v <= k.r; ++v)
          out.at(o, i, u, v) = (k.at(o, i, u, v) - k.at(i, o, -u, -v)) / 2.0;
  return out;
}

Mat random_skew_dense(int d, Rng& rng) {
  return antisymmetrize(rng.normal_mat(d, d));
}

ConvKernel random_kernel(int c, int r, Rng& rng) {
  ConvKernel k(c, r);
  for (int o = 0; o < c; ++o)
    for (int i = 0; i < c; ++i)
      for (int u = -r; u <= r; ++u)
        for (int v = -r; v <= r; ++v) k.at(o, i, u, v) = rng.normal();
  return k;
}

ConvKernel random_valid_kernel(int c, int r, Rng& rng) {
  return antisymmetrize(random_kernel(c, r, rng));
}

}  // namespace eqflow
