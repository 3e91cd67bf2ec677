#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eqflow/grid.hpp"
#include "eqflow/rng.hpp"

namespace eqflow {

struct RgbaImage {
  int h = 0, w = 0;
  std::vector<std::uint8_t> px;  // r,g,b,a per pixel, row-major

  std::uint8_t at(int y, int x, int ch) const {
    return px[static_cast<std::size_t>((y * w + x) * 4 + ch)];
  }
  std::uint8_t& at(int y, int x, int ch) {
    return px[static_cast<std::size_t>((y * w + x) * 4 + ch)];
  }
};

RgbaImage load_rgba_png(const std::string& path);
void save_rgba_png(const std::string& path, const RgbaImage& img);

struct Placement {
  int y = 0, x = 0;    // canvas cell of the rotated sprite's top-left
  double angle = 0.0;  // radians
};

// Rotated sprite occupancy: nearest-neighbor rotation about the sprite
// center into a square bounding box, alpha binarized at 0.5. Entries
// are 0 or 1.
Mat rotated_mask(const RgbaImage& pattern, double angle);

// Canvas cells covered by a placement, wraparound included.
std::vector<std::pair<int, int>> placement_cells(const Placement& p,
                                                 const Mat& mask, int h,
                                                 int w);

struct AlifeScene {
  Grid canvas;     // c=3 rgb in [0,1]
  Grid occupancy;  // c=1, entries 0 or 1
  std::vector<Placement> placements;
};

// Trial-and-reject placement on a toroidal canvas: for each of
// max_patterns sprites, draw up to attempts_per_pattern random
// (position, rotation) proposals and accept the first whose mask is
// disjoint from the occupancy so far.
AlifeScene make_alife_scene(const RgbaImage& pattern, int h, int w, Rng& rng,
                            int attempts_per_pattern = 2,
                            int max_patterns = 16);

// Occupancy grids of n independently generated scenes; scene i uses a
// stream derived from (seed, i), so jobs does not change the output.
std::vector<Grid> generate_alife_dataset(const RgbaImage& pattern, int n,
                                         int h, int w, std::uint64_t seed,
                                         int attempts_per_pattern = 2,
                                         int max_patterns = 16, int jobs = 1);

// Per-placement centroid through a rollout: at each frame the centroid
// of cells >= 0.5 within one sprite diagonal of the previous position,
// wraparound-aware.
struct CentroidTrack {
  int pattern = 0;
  std::vector<std::pair<double, double>> points;  // (y, x) per frame
};
std::vector<CentroidTrack> centroid_tracks(const AlifeScene& scene,
                                           const RgbaImage& pattern,
                                           const std::vector<Grid>& frames);

}  // namespace eqflow
