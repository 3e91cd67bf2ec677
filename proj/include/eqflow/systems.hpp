#pragma once

#include <cstdint>
#include <string>

#include "eqflow/field.hpp"
#include "eqflow/rng.hpp"

namespace eqflow {

// Toy 2-D distributions (samples as columns):
//   two_gaussians: equal mixture at (+-1.5, 0), sigma = 0.4
//   ring:          radius 1 + N(0, 0.1) noise, uniform angle
//   two_moons:     interleaved half-circles, radius 1, noise 0.1
Mat sample_toy2d(const std::string& name, int n, Rng& rng);

struct LorenzParams {
  double sigma = 10.0, rho = 28.0, beta = 8.0 / 3.0;
};

Vec lorenz_derivative(const Vec& x, const LorenzParams& p = {});

class LorenzField : public VelocityField {
 public:
  explicit LorenzField(LorenzParams p = {}) : p_(p) {}
  int dim() const override { return 3; }
  Vec eval(const Vec& x) const override { return lorenz_derivative(x, p_); }
  Vec jvp(const Vec& x, const Vec& t) const override;
  const LorenzParams& params() const { return p_; }

 private:
  LorenzParams p_;
};

// Long-trajectory Lorenz dataset: RK4 at dt = 0.01, discard a 1000-step
// transient, keep every 10th state, standardize per component.
struct LorenzDataset {
  Mat samples;        // 3 x n, standardized
  Vec mean, stddev;   // standardization parameters (original units)
};
LorenzDataset make_lorenz_dataset(int n, std::uint64_t seed,
                                  LorenzParams p = {});

}  // namespace eqflow
