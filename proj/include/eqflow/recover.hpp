#pragma once

#include <vector>

#include "eqflow/conv_denoiser.hpp"
#include "eqflow/gray_scott.hpp"
#include "eqflow/langevin.hpp"
#include "eqflow/metrics.hpp"

namespace eqflow {

struct RecoverConfig {
  double eta = 0.1;    // stabilization coefficient
  double alpha = 0.9;  // working noise scale of the score
  double dt = 1.0;     // SDE step, matching the simulator step
  int steps = 100;
  std::uint64_t seed = 0;
  std::vector<double> gammas = {1.0, -1.0};
};

struct RecoverCandidate {
  double gamma = 0.0;
  double similarity = 0.0;  // change-fingerprint cosine vs ground truth
};

struct RecoverResult {
  SkewOperator op;  // the selected orientation
  std::vector<Grid> rollout;
  std::vector<RecoverCandidate> candidates;
  int selected = 0;
};

// Rolls out the irreversible Langevin SDE once per candidate gamma,
// all from the same initial state and the same noise stream, then
// keeps the orientation whose change fingerprint is most similar to
// the ground-truth simulator's change over the same horizon.
RecoverResult recover_turing_dynamics(const GridDenoiser& score_model,
                                      const NoiseSchedule& sched,
                                      const Grid& preset_state,
                                      const GrayScottParams& truth,
                                      const RecoverConfig& cfg);

}  // namespace eqflow
