#pragma once

#include <functional>
#include <vector>

#include "eqflow/skew.hpp"

namespace eqflow {

struct LangevinConfig {
  double eta = 0.1;   // stabilization coefficient
  double dt = 0.01;
  int steps = 0;
  std::uint64_t seed = 0;
};

using ScoreFn = std::function<Vec(const Vec&)>;
using GridScoreFn = std::function<Grid(const Grid&)>;
// Maps the score to the structured drift v_S (identity of the SDE's
// first term); baselines substitute other linear maps here.
using GridDrift = std::function<Grid(const Grid&)>;

// One Euler-Maruyama step of dx = [v_S + eta * s] dt + sqrt(2 eta) dW.
Vec langevin_step(const Vec& x, const SkewOperator& op, const ScoreFn& score,
                  const LangevinConfig& cfg, Rng& rng);

// Evolve particle columns; particle j draws from a stream derived from
// (cfg.seed, j) so results are independent of batch layout.
Mat langevin_evolve(Mat X, const SkewOperator& op, const ScoreFn& score,
                    const LangevinConfig& cfg);

Grid langevin_step_grid(const Grid& x, const GridDrift& drift,
                        const GridScoreFn& score, const LangevinConfig& cfg,
                        Rng& rng);

// Full rollout (steps+1 frames including x0); the noise stream is fully
// determined by cfg.seed, so two rollouts with different drifts but the
// same seed see identical noise.
std::vector<Grid> langevin_rollout(const Grid& x0, const GridDrift& drift,
                                   const GridScoreFn& score,
                                   const LangevinConfig& cfg);

GridDrift kernel_drift(ConvKernel k);
GridDrift reweight_drift(Vec channel_weights);

}  // namespace eqflow
