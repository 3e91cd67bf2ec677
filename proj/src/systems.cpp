#include "eqflow/systems.hpp"

#include <cmath>
#include <numbers>

#include "eqflow/ode.hpp"

namespace eqflow {

Mat sample_toy2d(const std::string& name, int n, Rng& rng) {
  require(n >= 1, "sample_toy2d: n must be >= 1");
  Mat X(2, n);
  if (name == "two_gaussians") {
    for (int j = 0; j < n; ++j) {
      double cx = rng.uniform() < 0.5 ? -1.5 : 1.5;
      X(0, j) = cx + 0.4 * rng.normal();
      X(1, j) = 0.4 * rng.normal();
    }
  } else if (name == "ring") {
    for (int j = 0; j < n; ++j) {
      double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
      double r = 1.0 + 0.1 * rng.normal();
      X(0, j) = r * std::cos(theta);
      X(1, j) = r * std::sin(theta);
    }
  } else if (name == "two_moons") {
    for (int j = 0; j < n; ++j) {
      double t = rng.uniform(0.0, std::numbers::pi);
      if (rng.uniform() < 0.5) {
        X(0, j) = std::cos(t);
        X(1, j) = std::sin(t);
      } else {
        X(0, j) = 1.0 - std::cos(t);
        X(1, j) = 0.5 - std::sin(t);
      }
      X(0, j) += 0.1 * rng.normal();
      X(1, j) += 0.1 * rng.normal();
    }
  } else {
    throw InputError("unknown toy distribution: " + name);
  }
  return X;
}

Vec lorenz_derivative(const Vec& x, const LorenzParams& p) {
  require(x.size() == 3, "lorenz_derivative: state must be 3-dimensional");
  Vec d(3);
  d[0] = p.sigma * (x[1] - x[0]);
  d[1] = x[0] * (p.rho - x[2]) - x[1];
  d[2] = x[0] * x[1] - p.beta * x[2];
  return d;
}

Vec LorenzField::jvp(const Vec& x, const Vec& t) const {
  Vec out(3);
  out[0] = p_.sigma * (t[1] - t[0]);
  out[1] = (p_.rho - x[2]) * t[0] - t[1] - x[0] * t[2];
  out[2] = x[1] * t[0] + x[0] * t[1] - p_.beta * t[2];
  return out;
}

LorenzDataset make_lorenz_dataset(int n, std::uint64_t seed, LorenzParams p) {
  require(n >= 2, "make_lorenz_dataset: n must be >= 2");
  LorenzField field(p);
  Rng rng(derive_seed(seed, "lorenz_init"));
  Vec x(3);
  x << 1.0 + 0.1 * rng.normal(), 1.0 + 0.1 * rng.normal(),
      20.0 + 0.1 * rng.normal();

  const double dt = 0.01;
  const int transient = 1000, stride = 10;
  for (int i = 0; i < transient; ++i) x = rk4_step(field, x, dt);

  Mat raw(3, n);
  for (int j = 0; j < n; ++j) {
    for (int s = 0; s < stride; ++s) x = rk4_step(field, x, dt);
    raw.col(j) = x;
  }
  check_finite(raw, "make_lorenz_dataset: trajectory");

  LorenzDataset ds;
  ds.mean = raw.rowwise().mean();
  Mat centered = raw.colwise() - ds.mean;
  ds.stddev = centered.array().square().rowwise().mean().sqrt();
  ds.samples = ds.stddev.cwiseInverse().asDiagonal() * centered;
  return ds;
}

}  // namespace eqflow
