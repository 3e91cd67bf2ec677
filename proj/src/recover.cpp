#include "eqflow/recover.hpp"

namespace eqflow {

RecoverResult recover_turing_dynamics(const GridDenoiser& score_model,
                                      const NoiseSchedule& sched,
                                      const Grid& preset_state,
                                      const GrayScottParams& truth,
                                      const RecoverConfig& cfg) {
  require(preset_state.c == 2, "recover: state must have two channels");
  require(score_model.channels() == preset_state.c,
          "recover: score model channel mismatch");
  require(!cfg.gammas.empty(), "recover: need at least one candidate");
  require(cfg.steps >= 1, "recover: steps must be >= 1");

  GridScoreFn score = [&](const Grid& g) {
    return grid_score(score_model, sched, g, cfg.alpha);
  };

  DynamicsFingerprint target = change_fingerprint(
      preset_state,
      [&](const Grid& g) { return gray_scott_step(g, truth, cfg.dt); },
      cfg.steps);

  LangevinConfig lcfg;
  lcfg.eta = cfg.eta;
  lcfg.dt = cfg.dt;
  lcfg.steps = cfg.steps;
  lcfg.seed = cfg.seed;  // one stream for all candidates

  RecoverResult out;
  std::vector<std::vector<Grid>> rollouts;
  for (double gamma : cfg.gammas) {
    SkewOperator op = make_rotation_kernel(gamma);
    rollouts.push_back(
        langevin_rollout(preset_state, kernel_drift(op.kernel()), score, lcfg));
    const std::vector<Grid>& frames = rollouts.back();
    // replay the frames as a stepper so the fingerprint context matches
    // the ground truth's (same initial state, same horizon)
    int t = 0;
    DynamicsFingerprint fp = change_fingerprint(
        preset_state, [&](const Grid&) { return frames[++t]; }, cfg.steps);
    out.candidates.push_back({gamma, cosine_similarity(fp, target)});
  }

  out.selected = 0;
  for (size_t i = 1; i < out.candidates.size(); ++i)
    if (out.candidates[i].similarity >
        out.candidates[out.selected].similarity)
      out.selected = static_cast<int>(i);
  out.op = make_rotation_kernel(cfg.gammas[out.selected]);
  out.rollout = std::move(rollouts[out.selected]);
  return out;
}

}  // namespace eqflow
