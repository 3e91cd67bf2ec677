#pragma once

#include <string>
#include <vector>

#include "eqflow/conv_denoiser.hpp"
#include "eqflow/flow.hpp"
#include "eqflow/metrics.hpp"
#include "eqflow/recover.hpp"
#include "eqflow/systems.hpp"

namespace eqflow {

// Reusable experiment drivers shared by the CLI and the acceptance
// runner. Every sub-stream is derived from the study seed, so results
// are reproducible end to end.

// Ring pipeline: train a denoiser, distill its score into a flow, and
// compare distribution preservation against a random network of the
// same architecture.
struct RingStudyConfig {
  int n_train = 8192;
  int n_eval = 1024;
  int denoiser_epochs = 700;
  int flow_epochs = 500;
  std::vector<int> hidden = {64, 64};
  double alpha = 0.95;
  int steps = 100;
  double dt = 0.1;
  int every = 10;
  std::uint64_t seed = 0;
};

struct RingStudyResult {
  std::vector<std::pair<double, double>> trained_curve;
  std::vector<std::pair<double, double>> random_curve;
  double noise_floor = 0.0;  // MMD between two fresh standardized draws
  VelocityNetwork net;
  ResidualReport report;
};

RingStudyResult ring_preservation_study(const RingStudyConfig& cfg);

// Lorenz pipeline over several training seeds: chaos of the learned
// fields (largest Lyapunov exponent) and fingerprint similarities
// against the analytic system and random-network baselines. All
// fields live in the reference dataset's standardized coordinates.
struct LorenzStudyConfig {
  int n_seeds = 5;
  int n_samples = 4096;
  int denoiser_epochs = 700;
  int flow_epochs = 500;
  std::vector<int> hidden = {64, 64};
  double alpha = 0.95;
  int n_probes = 1024;
  int lyap_steps = 50000;
  double lyap_dt = 0.01;
  std::uint64_t seed = 0;
};

struct LorenzStudyResult {
  double lambda_truth = 0.0;  // Benettin on the analytic system
  std::vector<double> lambda_learned;
  std::vector<double> sim_learned_truth;  // sign-aligned cosine
  std::vector<double> sim_random_truth;
  double mean_pair_learned = 0.0;
  double mean_pair_random = 0.0;
};

LorenzStudyResult lorenz_study(const LorenzStudyConfig& cfg);

// Training-free Turing recovery on one preset: score training on
// simulator samples, gamma selection, and change-fingerprint
// similarities for the selected/rejected orientations plus the
// random-kernel and score-reweight baselines (all rollouts share the
// noise stream).
struct TuringStudyConfig {
  std::string preset = "life";
  int n_samples = 256;
  int hw = 64;
  int burn_in = 4000;
  GridTrainConfig train;
  int steps = 50;
  int n_random = 8;
  double eta = 0.1;
  double alpha = 0.9;
  double dt = 1.0;
  std::uint64_t seed = 0;
  int jobs = 1;  // dataset generation worker pool
};

struct TuringStudyResult {
  RecoverResult recover;
  std::vector<double> sim_random;
  double random_mean = 0.0;
  double random_std = 0.0;
  double sim_reweight = 0.0;
  double change_rel_learned = 0.0;  // |x_T - x_0| / |x_0|, selected rollout
  double change_rel_truth = 0.0;    // same under the true simulator
};

TuringStudyResult turing_recovery_study(const TuringStudyConfig& cfg);

// Mean and (population) standard deviation helpers for study summaries.
double mean_of(const std::vector<double>& v);
double std_of(const std::vector<double>& v);

}  // namespace eqflow
