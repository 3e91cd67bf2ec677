#pragma once

#include <string>

#include "eqflow/field.hpp"
#include "eqflow/rng.hpp"

namespace eqflow {

enum class DivMode { Exact, Fd, Hutchinson };

struct DivergenceEstimate {
  double value = 0.0;
  DivMode mode = DivMode::Exact;
  int probes = 0;  // Hutchinson only
};

// Trace of the Jacobian via per-axis jvp (exact when the field's jvp
// is analytic).
double divergence_exact(const VelocityField& f, const Vec& x);

// Central differences along the coordinate axes.
double divergence_fd(const VelocityField& f, const Vec& x, double h = 1e-3);

// Hutchinson trace estimator with explicit Gaussian probes (columns of
// Z): mean over probes of z . (v(x + h z) - v(x - h z)) / (2 h).
double divergence_hutchinson(const VelocityField& f, const Vec& x,
                             const Mat& Z, double h = 1e-4);

// Draws k probes from rng, then averages as above.
double divergence_hutchinson(const VelocityField& f, const Vec& x, int k,
                             Rng& rng, double h = 1e-4);

DivergenceEstimate estimate_divergence(const VelocityField& f, const Vec& x,
                                       DivMode mode, int k = 4,
                                       Rng* rng = nullptr);

DivMode parse_div_mode(const std::string& name);
std::string div_mode_name(DivMode m);

}  // namespace eqflow
