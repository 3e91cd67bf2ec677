#pragma once

#include <cstdint>
#include <vector>

#include "eqflow/divergence.hpp"
#include "eqflow/field.hpp"
#include "eqflow/rng.hpp"
#include "eqflow/schedule.hpp"
#include "eqflow/score_model.hpp"
#include "eqflow/velocity_net.hpp"

namespace eqflow {

struct FlowTrainConfig {
  int epochs = 2000;
  int batch = 256;
  double lr = 1e-3;
  int k_probes = 4;               // hutchinson probes per point
  DivMode div_mode = DivMode::Fd;
  double fd_h = 1e-3;
  double hutch_h = 1e-4;
  double alpha = 0.95;            // working noise level of the batch draw
  std::uint64_t seed = 0;
  int pe_octaves = 4;
  std::vector<int> hidden = {128, 128, 128};
};

// Pointwise continuity-equation residual: div v + v . s.
inline double residual(const Vec& v_at_x, double div_v, const Vec& s_at_x) {
  require(v_at_x.size() == s_at_x.size(), "residual: shape mismatch");
  return div_v + v_at_x.dot(s_at_x);
}

// Mean squared residual of a velocity field against a score field over
// the batch columns, divergence per cfg.div_mode. Fields are evaluated
// as-is (a VelocityNetwork runs in infer mode); hutchinson draws
// cfg.k_probes fresh probes per point from probe_rng.
double loss_batch(const VelocityField& v, const VelocityField& score_field,
                  const Mat& batch, const FlowTrainConfig& cfg,
                  Rng* probe_rng = nullptr);

struct ResidualReport {
  double mean_sq_residual = 0.0;
  Vec per_sample;            // signed residuals, one per batch column
  double mean_speed = 0.0;   // mean ||v(x)|| over the batch
  bool trivial = false;      // mean_speed < 0.1: normalization guard tripped
};

ResidualReport residual_report(const VelocityField& v,
                               const VelocityField& score_field,
                               const Mat& batch, const FlowTrainConfig& cfg,
                               Rng* probe_rng = nullptr);

struct FlowTrainResult {
  VelocityNetwork net;
  ResidualReport report;  // on a diffused draw of the dataset, infer mode
  TrainLog log;
};

// One training-objective evaluation on a fixed diffused batch X with
// teacher scores S: the unperturbed columns supply the normalization
// statistics, which the divergence stencil shares. Z holds hutchinson
// directions (d x B*k_probes, required in hutchinson mode). If grad is
// non-null it receives d(loss)/d(theta); if stats is non-null it
// receives the batch statistics for running updates.
double flow_objective(const VelocityNetwork& net, const Mat& X, const Mat& S,
                      const FlowTrainConfig& cfg, const Mat* Z = nullptr,
                      Vec* grad = nullptr,
                      VelocityNetwork::BatchStats* stats = nullptr);

// Trains a velocity network against a fixed score teacher: per epoch,
// mini-batches of freshly diffused samples at cfg.alpha; gradients flow
// through v and its divergence stencil but not through the score. The
// stencil evaluations share the unperturbed batch's normalization
// statistics. div_mode=exact is evaluation-only and rejected here.
FlowTrainResult train_flow(const Mat& samples,
                           const VelocityField& score_field,
                           const FlowTrainConfig& cfg);

// Convenience wrapper: the teacher is a trained denoiser read at the
// working noise level cfg.alpha.
FlowTrainResult train_flow(const Mat& samples, const DenseDenoiser& score_model,
                           const NoiseSchedule& sched,
                           const FlowTrainConfig& cfg);

}  // namespace eqflow
