#include "eqflow/metrics.hpp"

#include <cmath>
#include <cstring>

#include "eqflow/ode.hpp"

namespace eqflow {

namespace {
double mean_kernel(const Mat& A, const Mat& B, double sigma) {
  Vec a2 = A.colwise().squaredNorm();
  Vec b2 = B.colwise().squaredNorm();
  Mat d2 = (-2.0 * A.transpose() * B).rowwise() + b2.transpose();
  d2.colwise() += a2;
  return (d2.array().max(0.0) / (-2.0 * sigma * sigma)).exp().mean();
}
}  // namespace

double mmd_rbf(const Mat& X, const Mat& Y, double sigma) {
  require(X.cols() >= 1 && Y.cols() >= 1, "mmd_rbf: need samples");
  require(X.rows() == Y.rows(), "mmd_rbf: dimension mismatch");
  require(sigma > 0.0, "mmd_rbf: sigma must be positive");
  double m2 = mean_kernel(X, X, sigma) + mean_kernel(Y, Y, sigma) -
              2.0 * mean_kernel(X, Y, sigma);
  return std::sqrt(std::max(0.0, m2));
}

Standardizer fit_standardizer(const Mat& X) {
  Standardizer s;
  s.mean = X.rowwise().mean();
  Mat centered = X.colwise() - s.mean;
  s.stddev = centered.array().square().rowwise().mean().sqrt();
  require((s.stddev.array() > 0.0).all(),
          "fit_standardizer: degenerate component");
  return s;
}

std::vector<std::pair<double, double>> preservation_curve(
    const VelocityField& field, const Mat& samples, int steps, double dt,
    int every, double sigma) {
  require(steps >= 1 && every >= 1 && every <= steps,
          "preservation_curve: bad checkpoint spacing");
  Standardizer st = fit_standardizer(samples);
  Mat ref = st.apply(samples);
  std::vector<std::pair<double, double>> curve;
  Mat X = samples;
  for (int t = 1; t <= steps; ++t) {
    X = rk4_step_batch(field, X, dt);
    if (!X.allFinite())
      throw NumericalError("preservation_curve: trajectory became non-finite");
    if (t % every == 0)
      curve.emplace_back(t * dt, mmd_rbf(ref, st.apply(X), sigma));
  }
  return curve;
}

double lyapunov_max(const VelocityField& field, const Vec& x0, double d0,
                    double dt, int horizon_steps, int renorm_every) {
  require(d0 > 0.0 && dt > 0.0, "lyapunov_max: d0 and dt must be positive");
  require(horizon_steps >= renorm_every && renorm_every >= 1,
          "lyapunov_max: horizon must cover at least one renormalization");
  Vec xa = x0;
  Vec xb = x0;
  xb[0] += d0;  // fixed initial offset direction
  // measure stretch against the separation actually realized in floats
  const double d_ref = (xb - xa).norm();
  if (d_ref == 0.0)
    throw NumericalError("lyapunov_max: d0 vanished at this state scale");

  const int blocks = horizon_steps / renorm_every;
  const int skip = blocks / 2;  // transient half
  double log_sum = 0.0;
  int counted = 0;
  for (int b = 0; b < blocks; ++b) {
    for (int s = 0; s < renorm_every; ++s) {
      xa = rk4_step(field, xa, dt);
      xb = rk4_step(field, xb, dt);
    }
    if (!xa.allFinite() || !xb.allFinite())
      throw NumericalError("lyapunov_max: trajectory became non-finite");
    Vec delta = xb - xa;
    double d1 = delta.norm();
    if (d1 == 0.0)
      throw NumericalError("lyapunov_max: separation collapsed to zero");
    if (b >= skip) {
      log_sum += std::log(d1 / d_ref);
      ++counted;
    }
    xb = xa + (d_ref / d1) * delta;
  }
  return log_sum / (counted * renorm_every * dt);
}

std::uint64_t hash_values(const Vec& values) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](const void* p, size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ull;
    }
  };
  std::uint64_t len = values.size();
  mix(&len, sizeof(len));
  mix(values.data(), sizeof(double) * values.size());
  return h;
}

std::uint64_t hash_probes(const Mat& probes) {
  Vec flat(probes.size() + 2);
  flat[0] = static_cast<double>(probes.rows());
  flat[1] = static_cast<double>(probes.cols());
  std::memcpy(flat.data() + 2, probes.data(), sizeof(double) * probes.size());
  return hash_values(flat);
}

DynamicsFingerprint fingerprint(const VelocityField& field, const Mat& probes) {
  require(probes.rows() == field.dim(), "fingerprint: probe dim mismatch");
  require(probes.cols() >= 1, "fingerprint: need probe points");
  Mat V = field.eval_batch(probes);
  DynamicsFingerprint e;
  e.values = Eigen::Map<const Vec>(V.data(), V.size());
  e.probe_set_id = hash_probes(probes);
  return e;
}

Mat make_probes(const Mat& standardized_samples, int n) {
  require(n >= 1 && n <= standardized_samples.cols(),
          "make_probes: not enough samples for the probe set");
  return standardized_samples.leftCols(n);
}

DynamicsFingerprint align_sign(const DynamicsFingerprint& e,
                               const DynamicsFingerprint& ref) {
  require(e.probe_set_id == ref.probe_set_id,
          "align_sign: fingerprints use different probe sets");
  require(e.values.size() == ref.values.size(),
          "align_sign: length mismatch");
  DynamicsFingerprint out = e;
  if (e.values.dot(ref.values) < 0.0) out.values = -e.values;
  out.aligned_to = hash_values(ref.values);
  return out;
}

double cosine_similarity(const DynamicsFingerprint& e1,
                         const DynamicsFingerprint& e2) {
  require(e1.probe_set_id == e2.probe_set_id,
          "cosine_similarity: fingerprints use different probe sets");
  require(e1.values.size() == e2.values.size(),
          "cosine_similarity: length mismatch");
  double n1 = e1.values.norm(), n2 = e2.values.norm();
  require(n1 > 0.0 && n2 > 0.0, "cosine_similarity: zero fingerprint");
  return e1.values.dot(e2.values) / (n1 * n2);
}

DynamicsFingerprint change_fingerprint(const Grid& initial,
                                       const GridStepper& stepper, int T) {
  require(T >= 0, "change_fingerprint: T must be >= 0");
  Grid x = initial;
  for (int t = 0; t < T; ++t) {
    x = stepper(x);
    require(x.same_shape(initial), "change_fingerprint: stepper changed shape");
    if (!x.data.allFinite())
      throw NumericalError("change_fingerprint: rollout became non-finite");
  }
  DynamicsFingerprint e;
  e.values = x.data - initial.data;
  Vec ctx(initial.size() + 4);
  ctx[0] = initial.c;
  ctx[1] = initial.h;
  ctx[2] = initial.w;
  ctx[3] = T;
  ctx.tail(initial.size()) = initial.data;
  e.probe_set_id = hash_values(ctx);
  return e;
}

}  // namespace eqflow
