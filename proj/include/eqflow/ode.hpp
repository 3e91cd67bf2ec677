#pragma once

#include <vector>

#include "eqflow/field.hpp"

namespace eqflow {

Vec rk4_step(const VelocityField& f, const Vec& x, double dt);
Mat rk4_step_batch(const VelocityField& f, const Mat& X, double dt);

// Integrates x0 for `steps` steps; returns steps+1 states including x0.
// Throws NumericalError if the state leaves the finite range.
std::vector<Vec> rk4_trajectory(const VelocityField& f, const Vec& x0,
                                double dt, int steps);

// Batched endpoint-only integration (columns are particles).
Mat rk4_evolve(const VelocityField& f, Mat X, double dt, int steps);

}  // namespace eqflow
