#include "eqflow/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace eqflow {

double NoiseSchedule::alpha(double tau) const {
  require(tau >= 0.0 && tau <= 1.0, "alpha: tau must lie in [0, 1]");
  double c = std::cos((tau + s) / (1.0 + s) * std::numbers::pi / 2.0);
  return std::clamp(c * c, alpha_floor, alpha_ceil);
}

double NoiseSchedule::tau_for_alpha(double a) const {
  require(a > 0.0 && a < 1.0, "tau_for_alpha: alpha must lie in (0, 1)");
  double target = std::clamp(a, alpha_floor, alpha_ceil);
  // closed-form inverse of the unclamped schedule, then clamp to [0, 1]
  double tau =
      std::acos(std::sqrt(target)) * 2.0 * (1.0 + s) / std::numbers::pi - s;
  return std::clamp(tau, 0.0, 1.0);
}

Vec diffuse(const Vec& x0, double alpha, const Vec& eps) {
  require(alpha > 0.0 && alpha <= 1.0, "diffuse: alpha must lie in (0, 1]");
  require(x0.size() == eps.size(), "diffuse: shape mismatch");
  return std::sqrt(alpha) * x0 + std::sqrt(1.0 - alpha) * eps;
}

Mat diffuse(const Mat& X0, double alpha, const Mat& Eps) {
  require(alpha > 0.0 && alpha <= 1.0, "diffuse: alpha must lie in (0, 1]");
  require(X0.rows() == Eps.rows() && X0.cols() == Eps.cols(),
          "diffuse: shape mismatch");
  return std::sqrt(alpha) * X0 + std::sqrt(1.0 - alpha) * Eps;
}

}  // namespace eqflow
