#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace eqflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Malformed input: bad CLI arguments, unreadable or inconsistent files.
// The CLI maps this to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure: non-finite state during integration or training.
// The CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InputError(msg);
}

inline void check_finite(const Eigen::Ref<const Mat>& m, const std::string& what) {
  if (!m.allFinite()) throw NumericalError(what + ": non-finite values");
}

inline double sq(double x) { return x * x; }

}  // namespace eqflow
