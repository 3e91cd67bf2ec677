#include "eqflow/langevin.hpp"

#include <cmath>

namespace eqflow {

Vec langevin_step(const Vec& x, const SkewOperator& op, const ScoreFn& score,
                  const LangevinConfig& cfg, Rng& rng) {
  require(cfg.dt > 0.0, "langevin_step: dt must be positive");
  require(cfg.eta >= 0.0, "langevin_step: eta must be >= 0");
  Vec s = score(x);
  Vec drift = v_skew(op, s) + cfg.eta * s;
  Vec next = x + cfg.dt * drift;
  if (cfg.eta > 0.0)
    next += std::sqrt(2.0 * cfg.eta * cfg.dt) *
            rng.normal_vec(static_cast<int>(x.size()));
  if (!next.allFinite())
    throw NumericalError("langevin_step: state became non-finite");
  return next;
}

Mat langevin_evolve(Mat X, const SkewOperator& op, const ScoreFn& score,
                    const LangevinConfig& cfg) {
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    Rng rng(derive_seed(cfg.seed, "langevin_particle", j));
    Vec x = X.col(j);
    for (int t = 0; t < cfg.steps; ++t) x = langevin_step(x, op, score, cfg, rng);
    X.col(j) = x;
  }
  return X;
}

Grid langevin_step_grid(const Grid& x, const GridDrift& drift,
                        const GridScoreFn& score, const LangevinConfig& cfg,
                        Rng& rng) {
  require(cfg.dt > 0.0, "langevin_step_grid: dt must be positive");
  Grid s = score(x);
  Grid v = drift(s);
  require(v.same_shape(x) && s.same_shape(x),
          "langevin_step_grid: shape mismatch");
  Grid next = x;
  next.data += cfg.dt * (v.data + cfg.eta * s.data);
  if (cfg.eta > 0.0)
    next.data += std::sqrt(2.0 * cfg.eta * cfg.dt) * rng.normal_vec(x.size());
  if (!next.data.allFinite())
    throw NumericalError("langevin_step_grid: state became non-finite");
  return next;
}

std::vector<Grid> langevin_rollout(const Grid& x0, const GridDrift& drift,
                                   const GridScoreFn& score,
                                   const LangevinConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, "langevin_noise"));
  std::vector<Grid> frames;
  frames.reserve(cfg.steps + 1);
  frames.push_back(x0);
  for (int t = 0; t < cfg.steps; ++t)
    frames.push_back(langevin_step_grid(frames.back(), drift, score, cfg, rng));
  return frames;
}

GridDrift kernel_drift(ConvKernel k) {
  return [k = std::move(k)](const Grid& s) { return apply_kernel(k, s); };
}

GridDrift reweight_drift(Vec channel_weights) {
  return [w = std::move(channel_weights)](const Grid& s) {
    require(static_cast<int>(w.size()) == s.c,
            "reweight_drift: weight count must match channels");
    Grid out = s;
    for (int ch = 0; ch < s.c; ++ch) out.channel(ch) *= w[ch];
    return out;
  };
}

}  // namespace eqflow
