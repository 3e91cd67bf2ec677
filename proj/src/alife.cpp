#include "eqflow/alife.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>

#include <png.h>

#include "eqflow/parallel.hpp"

namespace eqflow {

RgbaImage load_rgba_png(const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  require(fp != nullptr, "cannot open " + path);
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_stdio(&img, fp)) {
    std::fclose(fp);
    throw InputError(path + ": not a readable PNG");
  }
  img.format = PNG_FORMAT_RGBA;
  RgbaImage out;
  out.h = static_cast<int>(img.height);
  out.w = static_cast<int>(img.width);
  out.px.resize(static_cast<std::size_t>(out.h) * out.w * 4);
  if (!png_image_finish_read(&img, nullptr, out.px.data(), 0, nullptr)) {
    std::fclose(fp);
    throw InputError(path + ": failed to decode PNG");
  }
  std::fclose(fp);
  return out;
}

void save_rgba_png(const std::string& path, const RgbaImage& img) {
  require(img.h >= 1 && img.w >= 1 &&
              img.px.size() == static_cast<std::size_t>(img.h) * img.w * 4,
          "save_rgba_png: malformed image");
  png_image out;
  std::memset(&out, 0, sizeof(out));
  out.version = PNG_IMAGE_VERSION;
  out.width = static_cast<png_uint_32>(img.w);
  out.height = static_cast<png_uint_32>(img.h);
  out.format = PNG_FORMAT_RGBA;
  require(png_image_write_to_file(&out, path.c_str(), 0, img.px.data(), 0,
                                  nullptr) != 0,
          "cannot write " + path);
}

Mat rotated_mask(const RgbaImage& pattern, double angle) {
  int bb = static_cast<int>(
      std::ceil(std::hypot(static_cast<double>(pattern.h), pattern.w)));
  Mat mask = Mat::Zero(bb, bb);
  double cy = 0.5 * (pattern.h - 1), cx = 0.5 * (pattern.w - 1);
  double oy = 0.5 * (bb - 1), ox = 0.5 * (bb - 1);
  double c = std::cos(angle), s = std::sin(angle);
  for (int y = 0; y < bb; ++y)
    for (int x = 0; x < bb; ++x) {
      // inverse rotation back into sprite coordinates
      double dy = y - oy, dx = x - ox;
      int sy = static_cast<int>(std::lround(cy + c * dy + s * dx));
      int sx = static_cast<int>(std::lround(cx - s * dy + c * dx));
      if (sy < 0 || sy >= pattern.h || sx < 0 || sx >= pattern.w) continue;
      if (pattern.at(sy, sx, 3) >= 128) mask(y, x) = 1.0;
    }
  return mask;
}

std::vector<std::pair<int, int>> placement_cells(const Placement& p,
                                                 const Mat& mask, int h,
                                                 int w) {
  std::vector<std::pair<int, int>> cells;
  for (int y = 0; y < mask.rows(); ++y)
    for (int x = 0; x < mask.cols(); ++x)
      if (mask(y, x) > 0.5)
        cells.emplace_back(((p.y + y) % h + h) % h, ((p.x + x) % w + w) % w);
  return cells;
}

AlifeScene make_alife_scene(const RgbaImage& pattern, int h, int w, Rng& rng,
                            int attempts_per_pattern, int max_patterns) {
  require(pattern.h >= 1 && pattern.w >= 1, "make_alife_scene: empty pattern");
  require(pattern.h < h && pattern.w < w,
          "make_alife_scene: pattern must be smaller than the canvas");
  require(attempts_per_pattern >= 1 && max_patterns >= 1,
          "make_alife_scene: bad attempt counts");

  AlifeScene scene;
  scene.canvas = Grid(3, h, w);
  scene.occupancy = Grid(1, h, w);
  scene.canvas.data.setZero();
  scene.occupancy.data.setZero();

  for (int i = 0; i < max_patterns; ++i) {
    for (int attempt = 0; attempt < attempts_per_pattern; ++attempt) {
      Placement p;
      p.y = static_cast<int>(rng.uniform(0.0, 1.0) * h) % h;
      p.x = static_cast<int>(rng.uniform(0.0, 1.0) * w) % w;
      p.angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
      Mat mask = rotated_mask(pattern, p.angle);
      auto cells = placement_cells(p, mask, h, w);

      bool free = true;
      for (auto [y, x] : cells)
        if (scene.occupancy.at(0, y, x) > 0.5) {
          free = false;
          break;
        }
      if (!free) continue;

      for (int my = 0; my < mask.rows(); ++my)
        for (int mx = 0; mx < mask.cols(); ++mx) {
          if (mask(my, mx) < 0.5) continue;
          int y = ((p.y + my) % h + h) % h, x = ((p.x + mx) % w + w) % w;
          scene.occupancy.at(0, y, x) = 1.0;
          // nearest sprite pixel for the rgb channels
          double dy = my - 0.5 * (mask.rows() - 1);
          double dx = mx - 0.5 * (mask.cols() - 1);
          double c = std::cos(p.angle), s = std::sin(p.angle);
          int sy = static_cast<int>(
              std::lround(0.5 * (pattern.h - 1) + c * dy + s * dx));
          int sx = static_cast<int>(
              std::lround(0.5 * (pattern.w - 1) - s * dy + c * dx));
          sy = std::clamp(sy, 0, pattern.h - 1);
          sx = std::clamp(sx, 0, pattern.w - 1);
          for (int ch = 0; ch < 3; ++ch)
            scene.canvas.at(ch, y, x) = pattern.at(sy, sx, ch) / 255.0;
        }
      scene.placements.push_back(p);
      break;
    }
  }
  return scene;
}

std::vector<Grid> generate_alife_dataset(const RgbaImage& pattern, int n,
                                         int h, int w, std::uint64_t seed,
                                         int attempts_per_pattern,
                                         int max_patterns, int jobs) {
  require(n >= 1, "generate_alife_dataset: n must be >= 1");
  std::vector<Grid> out(n);
  parallel_for(n, jobs, [&](int i) {
    Rng rng(derive_seed(seed, "alife_scene", i));
    out[i] = make_alife_scene(pattern, h, w, rng, attempts_per_pattern,
                              max_patterns)
                 .occupancy;
  });
  return out;
}

std::vector<CentroidTrack> centroid_tracks(const AlifeScene& scene,
                                           const RgbaImage& pattern,
                                           const std::vector<Grid>& frames) {
  require(!frames.empty(), "centroid_tracks: no frames");
  const int h = frames[0].h, w = frames[0].w;
  const double radius = std::hypot(static_cast<double>(pattern.h), pattern.w);
  std::vector<CentroidTrack> tracks;
  for (size_t i = 0; i < scene.placements.size(); ++i) {
    CentroidTrack track;
    track.pattern = static_cast<int>(i);
    tracks.push_back(track);
    // start at the center of the placement's bounding box
    double cy = scene.placements[i].y + 0.5 * (radius - 1);
    double cx = scene.placements[i].x + 0.5 * (radius - 1);
    for (const Grid& f : frames) {
      double sy = 0, sx = 0, mass = 0;
      int r = static_cast<int>(std::ceil(radius));
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          if (dy * dy + dx * dx > radius * radius) continue;
          int y = ((static_cast<int>(std::lround(cy)) + dy) % h + h) % h;
          int x = ((static_cast<int>(std::lround(cx)) + dx) % w + w) % w;
          double v = f.at(0, y, x);
          if (v < 0.5) continue;
          sy += v * (cy + dy);
          sx += v * (cx + dx);
          mass += v;
        }
      if (mass > 0) {
        cy = sy / mass;
        cx = sx / mass;
      }
      tracks.back().points.emplace_back(cy, cx);
    }
  }
  return tracks;
}

}  // namespace eqflow
