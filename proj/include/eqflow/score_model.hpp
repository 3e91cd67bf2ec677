#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eqflow/field.hpp"
#include "eqflow/mlp.hpp"
#include "eqflow/rng.hpp"
#include "eqflow/schedule.hpp"

namespace eqflow {

// What the denoiser network predicts.
enum class Objective { Eps, V };

Objective parse_objective(const std::string& name);
std::string objective_name(Objective o);

// MLP denoiser over vector states. Input is the Fourier-encoded joint
// vector [x; tau]; output has the state's width and is read as eps-hat
// or v-hat depending on the objective.
class DenseDenoiser {
 public:
  DenseDenoiser() = default;
  DenseDenoiser(int dim, Objective obj, int pe_octaves,
                std::vector<int> hidden, std::uint64_t seed);

  int dim() const { return d_; }
  Objective objective() const { return obj_; }
  int pe_octaves() const { return pe_; }

  Mat encode(const Mat& X, const Vec& taus) const;
  Mat predict_batch(const Mat& X, const Vec& taus) const;
  Vec predict(const Vec& x, double tau) const;

  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }

 private:
  int d_ = 0;
  Objective obj_ = Objective::Eps;
  int pe_ = 4;
  Mlp net_;
};

struct DenoiserTrainConfig {
  int epochs = 2000;
  int batch = 256;
  double lr = 1e-3;
  double tau_min = 0.01;
  double ema_decay = 0.999;  // 0 keeps the last iterate
  std::uint64_t seed = 0;
  int pe_octaves = 4;
  std::vector<int> hidden = {128, 128, 128};
};

struct TrainLog {
  std::vector<double> epoch_loss;
  double final_loss = 0.0;
};

// Denoising score-matching on samples (columns): draw tau and eps per
// element, diffuse, regress the objective target under MSE.
DenseDenoiser train_denoiser(const Mat& samples, const NoiseSchedule& sched,
                             Objective obj, const DenoiserTrainConfig& cfg,
                             TrainLog* log = nullptr);

// The objective-specific inversion shared by all denoisers:
// eps: x0 = (x_tau - sqrt(1-alpha) pred) / sqrt(alpha);
// v:   x0 = sqrt(alpha) x_tau - sqrt(1-alpha) pred.
Mat x0_from_prediction(Objective obj, const Mat& X_tau, const Mat& pred,
                       double alpha);

// x0 recovered from the network output at (x_tau, tau).
Vec predict_x0(const DenseDenoiser& m, const NoiseSchedule& sched,
               const Vec& x_tau, double tau);
Mat predict_x0_batch(const DenseDenoiser& m, const NoiseSchedule& sched,
                     const Mat& X_tau, double tau);

// Score of the alpha-smoothed density: (sqrt(alpha) x0_hat - x) / (1 - alpha).
Vec score(const DenseDenoiser& m, const NoiseSchedule& sched, const Vec& x,
          double alpha);
Mat score_batch(const DenseDenoiser& m, const NoiseSchedule& sched,
                const Mat& X, double alpha);

// The score at a fixed working alpha viewed as a velocity field.
class ScoreField : public VelocityField {
 public:
  ScoreField(const DenseDenoiser& m, const NoiseSchedule& sched, double alpha)
      : m_(&m), sched_(sched), alpha_(alpha), tau_(sched.tau_for_alpha(alpha)) {}

  int dim() const override { return m_->dim(); }
  Vec eval(const Vec& x) const override { return score(*m_, sched_, x, alpha_); }
  Mat eval_batch(const Mat& X) const override {
    return score_batch(*m_, sched_, X, alpha_);
  }
  double alpha() const { return alpha_; }
  double tau() const { return tau_; }

 private:
  const DenseDenoiser* m_;
  NoiseSchedule sched_;
  double alpha_, tau_;
};

}  // namespace eqflow
