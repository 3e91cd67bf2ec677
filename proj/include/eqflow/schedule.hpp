#pragma once

#include "eqflow/common.hpp"

namespace eqflow {

// Cosine noise schedule: alpha(tau) = cos^2(((tau + s) / (1 + s)) * pi/2),
// clamped to [alpha_floor, alpha_ceil]. alpha is the squared signal level
// kept at diffusion time tau in [0, 1]; it decreases monotonically.
struct NoiseSchedule {
  double s = 0.008;
  double alpha_floor = 1e-5;
  double alpha_ceil = 1.0 - 1e-5;

  double alpha(double tau) const;

  // Inverse of alpha on [0, 1]; |alpha(result) - a| <= 1e-6 for any a
  // attainable under the clamp.
  double tau_for_alpha(double a) const;
};

// Forward diffusion: x_tau = sqrt(alpha) x0 + sqrt(1 - alpha) eps.
Vec diffuse(const Vec& x0, double alpha, const Vec& eps);
Mat diffuse(const Mat& X0, double alpha, const Mat& Eps);

}  // namespace eqflow
