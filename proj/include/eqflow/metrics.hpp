#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "eqflow/field.hpp"
#include "eqflow/grid.hpp"

namespace eqflow {

// Biased V-statistic RBF MMD between sample columns of X and Y:
// sqrt(max(0, mean k(X,X) + mean k(Y,Y) - 2 mean k(X,Y))),
// k(a,b) = exp(-|a-b|^2 / (2 sigma^2)).
double mmd_rbf(const Mat& X, const Mat& Y, double sigma = 0.5);

struct Standardizer {
  Vec mean, stddev;
  Mat apply(const Mat& X) const {
    return stddev.cwiseInverse().asDiagonal() * (X.colwise() - mean);
  }
};
Standardizer fit_standardizer(const Mat& X);

// RK4-evolve the sample cloud and report MMD(initial, evolved) at every
// checkpoint, computed on coordinates standardized by the initial set.
std::vector<std::pair<double, double>> preservation_curve(
    const VelocityField& field, const Mat& samples, int steps = 100,
    double dt = 0.1, int every = 10, double sigma = 0.5);

// Benettin two-trajectory estimate of the largest Lyapunov exponent;
// the average log stretch is taken over the second half of the horizon.
double lyapunov_max(const VelocityField& field, const Vec& x0,
                    double d0 = 1e-8, double dt = 0.01,
                    int horizon_steps = 50000, int renorm_every = 10);

// Field evaluations concatenated at fixed probe points (or a flattened
// grid change); probe_set_id guards against comparing fingerprints
// built from different probe sets.
struct DynamicsFingerprint {
  Vec values;
  std::uint64_t probe_set_id = 0;
  std::optional<std::uint64_t> aligned_to;
};

std::uint64_t hash_probes(const Mat& probes);
std::uint64_t hash_values(const Vec& values);

DynamicsFingerprint fingerprint(const VelocityField& field, const Mat& probes);

// Probe points are the first n columns of a standardized dataset.
Mat make_probes(const Mat& standardized_samples, int n);

DynamicsFingerprint align_sign(const DynamicsFingerprint& e,
                               const DynamicsFingerprint& ref);
double cosine_similarity(const DynamicsFingerprint& e1,
                         const DynamicsFingerprint& e2);

using GridStepper = std::function<Grid(const Grid&)>;

// flatten(x_T - x_0) under a deterministic stepper; the probe id hashes
// the initial state and T so only like-for-like changes are compared.
DynamicsFingerprint change_fingerprint(const Grid& initial,
                                       const GridStepper& stepper, int T);

}  // namespace eqflow
