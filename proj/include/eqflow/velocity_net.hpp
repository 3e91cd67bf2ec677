#pragma once

#include <cstdint>
#include <vector>

#include "eqflow/field.hpp"
#include "eqflow/mlp.hpp"
#include "eqflow/positional.hpp"

namespace eqflow {

struct VelocityNetConfig {
  int dim = 2;
  int pe_octaves = 4;
  std::vector<int> hidden = {128, 128, 128};
  std::uint64_t seed = 0;
};

// MLP velocity field with Fourier-feature inputs and a normalization
// output layer (no learnable affine). In train mode outputs are
// normalized with statistics of the current batch, which pins the batch
// mean of every velocity component to zero; in infer mode the running
// statistics collected during training are used instead.
class VelocityNetwork : public VelocityField {
 public:
  static constexpr double kEps = 1e-5;
  static constexpr double kMomentum = 0.1;

  VelocityNetwork() = default;
  explicit VelocityNetwork(const VelocityNetConfig& cfg);

  int dim() const override { return d_; }
  int pe_octaves() const { return pe_; }

  // Infer mode: normalize with running statistics.
  Vec eval(const Vec& x) const override;
  Mat eval_batch(const Mat& X) const override;
  Vec jvp(const Vec& x, const Vec& t) const override;  // exact, infer mode

  // Raw (pre-normalization) network output for a batch; cache optional.
  Mat raw_forward(const Mat& X, Mlp::Cache* cache = nullptr) const;
  Mat raw_forward_single(const Vec& x) const { return raw_forward(x); }

  // Train-mode forward: statistics come from this batch (biased
  // variance, 1/B). Requires B >= 2.
  struct BatchStats {
    Vec mean, var, inv_std;
  };
  static BatchStats batch_stats(const Mat& raw);
  Mat forward_train(const Mat& X) const;

  // Blend batch statistics into the running estimates.
  void update_running(const BatchStats& st);

  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }
  Vec& running_mean() { return run_mean_; }
  Vec& running_var() { return run_var_; }
  const Vec& running_mean() const { return run_mean_; }
  const Vec& running_var() const { return run_var_; }

 private:
  int d_ = 0;
  int pe_ = 4;
  Mlp net_;
  Vec run_mean_, run_var_;
};

}  // namespace eqflow
