#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eqflow/grid.hpp"
#include "eqflow/rng.hpp"

namespace eqflow {

struct GrayScottParams {
  double Du = 0.16, Dv = 0.08;
  double F = 0.0, kill = 0.0;
};

// Presets: life, wave, spirals, maze. Throws on unknown names.
GrayScottParams gray_scott_preset(const std::string& name);
const std::vector<std::string>& gray_scott_preset_names();

// One explicit-Euler step of
//   du/dt = Du Lap(u) - u v^2 + F (1 - u)
//   dv/dt = Dv Lap(v) + u v^2 - (F + kill) v
// on a periodic lattice with dx = 1. State channels are (u, v).
void gray_scott_step_inplace(Grid& state, const GrayScottParams& p, double dt);
Grid gray_scott_step(const Grid& state, const GrayScottParams& p, double dt);

// u = 1, v = 0 background with 5-20 random 6x6 v = 0.5 splotches.
Grid gray_scott_init(int h, int w, Rng& rng);

// Independent runs from randomized seeds, each evolved burn_in steps.
// Run i derives its stream from (seed, i), so the result is the same
// for any jobs count.
std::vector<Grid> generate_turing_dataset(const GrayScottParams& p, int n,
                                          int h, int w, int burn_in,
                                          std::uint64_t seed, double dt = 1.0,
                                          int jobs = 1);

}  // namespace eqflow
