#pragma once

#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "eqflow/conv_denoiser.hpp"
#include "eqflow/grid.hpp"
#include "eqflow/score_model.hpp"
#include "eqflow/velocity_net.hpp"

namespace eqflow {

inline constexpr const char* kVersion = "0.1.0";

// All artifacts are little-endian binaries with a 5-byte magic, u32
// header fields, and 32-bit float payloads. Writers go through a
// temporary file in the same directory plus an atomic rename.

// Runs fn against a temp file stream, then renames onto path.
void atomic_write(const std::string& path,
                  const std::function<void(std::ostream&)>& fn);

// "EQFD1": rank (2 or 4), dims (n, d) or (n, c, h, w), then samples.
// Vector samples are columns of the matrix; each sample is contiguous
// in the file.
void write_dataset(const std::string& path, const Mat& samples);
void write_dataset(const std::string& path, const std::vector<Grid>& grids);

struct Dataset {
  int rank = 0;              // 2 or 4
  Mat vectors;               // rank 2: d x n
  std::vector<Grid> grids;   // rank 4
  bool is_grid() const { return rank == 4; }
};
Dataset read_dataset(const std::string& path);

// "EQFR1": frames along the leading axis of a rank-4 container.
void write_rollout(const std::string& path, const std::vector<Grid>& frames);
std::vector<Grid> read_rollout(const std::string& path);

// "EQFV1": d, pe octaves, layer sizes, then parameters in declaration
// order (MLP weights, running mean, running variance).
void save_velocity_net(const std::string& path, const VelocityNetwork& net);
VelocityNetwork load_velocity_net(const std::string& path);

// "EQFS1": objective tag, kind (0 dense, 1 grid), architecture header,
// then parameters.
void save_denoiser(const std::string& path, const DenseDenoiser& m);
void save_denoiser(const std::string& path, const GridDenoiser& m);

struct LoadedDenoiser {
  int kind = 0;  // 0 dense, 1 grid
  DenseDenoiser dense;
  GridDenoiser grid;
};
LoadedDenoiser load_denoiser(const std::string& path);

// JSON sidecar <artifact>.manifest.json echoing the resolved run
// configuration, inputs, and the code version.
void write_manifest(const std::string& artifact_path,
                    const std::string& command,
                    const std::map<std::string, std::string>& config,
                    const std::vector<std::string>& inputs = {});

}  // namespace eqflow
