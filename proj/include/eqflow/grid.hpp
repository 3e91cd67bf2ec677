#pragma once

#include "eqflow/common.hpp"

namespace eqflow {

// Channel-major grid state on a periodic lattice: entry (ch, y, x) lives
// at data[(ch * h + y) * w + x]. Flattening for dense operators uses the
// same order.
struct Grid {
  int c = 0, h = 0, w = 0;
  Vec data;

  Grid() = default;
  Grid(int c_, int h_, int w_)
      : c(c_), h(h_), w(w_), data(Vec::Zero(c_ * h_ * w_)) {}

  int size() const { return c * h * w; }

  double& at(int ch, int y, int x) { return data[(ch * h + y) * w + x]; }
  double at(int ch, int y, int x) const { return data[(ch * h + y) * w + x]; }

  Eigen::Map<Vec> channel(int ch) {
    return {data.data() + ch * h * w, h * w};
  }
  Eigen::Map<const Vec> channel(int ch) const {
    return {data.data() + ch * h * w, h * w};
  }

  bool same_shape(const Grid& o) const {
    return c == o.c && h == o.h && w == o.w;
  }
};

// 5-point periodic Laplacian with dx = 1 of a single h x w channel.
void laplacian_periodic(const double* f, int h, int w, double* out);

}  // namespace eqflow
