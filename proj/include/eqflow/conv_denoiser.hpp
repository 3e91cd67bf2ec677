#pragma once

#include <cstdint>
#include <vector>

#include "eqflow/grid.hpp"
#include "eqflow/rng.hpp"
#include "eqflow/schedule.hpp"
#include "eqflow/score_model.hpp"

namespace eqflow {

// Convolutional denoiser for grid states: an encoder of 3x3 circular
// convolutions (the first at stride 1, the rest at stride 2) through
// the given widths, mirrored by nearest-upsample + conv stages whose
// inputs concatenate the matching encoder output (U-Net skips), and a
// linear 3x3 head back to the data channels. tau enters as a constant
// extra input channel. The network is resolution-agnostic; callers
// supply h and w, which must be divisible by 2^(#widths - 1).
class GridDenoiser {
 public:
  struct Cache {
    int B = 0, h = 0, w = 0;
    std::vector<Mat> inputs;  // per conv layer: its input maps (post-upsample)
    std::vector<Mat> pre;     // per conv layer: pre-activation maps
  };

  GridDenoiser() = default;
  GridDenoiser(int channels, Objective obj, std::vector<int> widths,
               std::uint64_t seed);

  int channels() const { return c_; }
  Objective objective() const { return obj_; }
  const std::vector<int>& widths() const { return widths_; }
  int stride_factor() const;  // 2^(#widths - 1)

  Vec& params() { return theta_; }
  const Vec& params() const { return theta_; }
  int n_params() const { return static_cast<int>(theta_.size()); }

  // Columns of X are flattened grids (channel-major, then row, then
  // column, as in Grid::data); output has the same layout and shape.
  Mat predict_batch(const Mat& X, const Vec& taus, int h, int w,
                    Cache* cache = nullptr) const;
  Grid predict(const Grid& g, double tau) const;

  // Accumulates d(loss)/d(theta) given the cotangent dY on the output
  // of the forward pass that filled cache. Columns are rebuilt here
  // rather than cached, trading compute for memory.
  void backward(const Mat& dY, const Cache& cache, Vec& grad) const;

 private:
  struct Layer {
    int in_c = 0, out_c = 0, stride = 1;
    bool pre_up = false;  // nearest x2 upsample before the convolution
    bool linear = false;  // no activation (output head)
    int skip_c = 0;       // encoder channels concatenated after upsampling
    int skip_from = -1;   // encoder layer whose output feeds the skip
  };
  std::vector<Layer> layers_;
  std::vector<int> w_off_, b_off_;
  std::vector<int> widths_;
  int c_ = 0;
  Objective obj_ = Objective::Eps;
  Vec theta_;

  Eigen::Map<const Mat> W(int l) const;
  Eigen::Map<const Vec> b(int l) const;
};

struct GridTrainConfig {
  int epochs = 50;
  int batch = 16;
  double lr = 1e-3;
  double tau_min = 0.01;
  double ema_decay = 0.999;  // 0 keeps the last iterate
  std::uint64_t seed = 0;
  std::vector<int> widths = {16, 32, 64};
};

// Denoising score-matching over a set of same-shape grids, mirroring
// the dense trainer: fresh tau and noise per sample per epoch.
GridDenoiser train_grid_denoiser(const std::vector<Grid>& samples,
                                 const NoiseSchedule& sched, Objective obj,
                                 const GridTrainConfig& cfg,
                                 TrainLog* log = nullptr);

// Score of the alpha-smoothed grid density via the x0 inversion, one
// value per pixel and channel.
Grid grid_score(const GridDenoiser& m, const NoiseSchedule& sched,
                const Grid& x, double alpha);

}  // namespace eqflow
