#include "eqflow/ode.hpp"

namespace eqflow {

Vec rk4_step(const VelocityField& f, const Vec& x, double dt) {
  Vec k1 = f.eval(x);
  Vec k2 = f.eval(x + 0.5 * dt * k1);
  Vec k3 = f.eval(x + 0.5 * dt * k2);
  Vec k4 = f.eval(x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Mat rk4_step_batch(const VelocityField& f, const Mat& X, double dt) {
  Mat k1 = f.eval_batch(X);
  Mat k2 = f.eval_batch(X + 0.5 * dt * k1);
  Mat k3 = f.eval_batch(X + 0.5 * dt * k2);
  Mat k4 = f.eval_batch(X + dt * k3);
  return X + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::vector<Vec> rk4_trajectory(const VelocityField& f, const Vec& x0,
                                double dt, int steps) {
  require(steps >= 0, "rk4_trajectory: steps must be >= 0");
  std::vector<Vec> out;
  out.reserve(steps + 1);
  out.push_back(x0);
  Vec x = x0;
  for (int i = 0; i < steps; ++i) {
    x = rk4_step(f, x, dt);
    if (!x.allFinite())
      throw NumericalError("rk4_trajectory: state became non-finite at step " +
                           std::to_string(i + 1));
    out.push_back(x);
  }
  return out;
}

Mat rk4_evolve(const VelocityField& f, Mat X, double dt, int steps) {
  for (int i = 0; i < steps; ++i) {
    X = rk4_step_batch(f, X, dt);
    if (!X.allFinite())
      throw NumericalError("rk4_evolve: state became non-finite at step " +
                           std::to_string(i + 1));
  }
  return X;
}

}  // namespace eqflow
