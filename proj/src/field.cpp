#include "eqflow/field.hpp"

#include <cmath>

namespace eqflow {

Vec VelocityField::jvp(const Vec& x, const Vec& t) const {
  double tn = t.norm();
  if (tn == 0.0) return Vec::Zero(dim());
  // Step scaled so the perturbation magnitude tracks the state scale.
  double h = 1e-6 * (1.0 + x.norm()) / tn;
  return (eval(x + h * t) - eval(x - h * t)) / (2.0 * h);
}

Mat VelocityField::eval_batch(const Mat& X) const {
  Mat V(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) V.col(j) = eval(X.col(j));
  return V;
}

}  // namespace eqflow
