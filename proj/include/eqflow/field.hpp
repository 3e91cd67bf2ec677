#pragma once

#include <functional>
#include <memory>

#include "eqflow/common.hpp"

namespace eqflow {

// A time-independent velocity field v : R^d -> R^d. States are column
// vectors; batched states are d x B matrices with one state per column.
class VelocityField {
 public:
  virtual ~VelocityField() = default;

  virtual int dim() const = 0;
  virtual Vec eval(const Vec& x) const = 0;

  // Jacobian-vector product J(x) * t. The default is a central
  // difference; fields with cheap analytic Jacobians override it.
  virtual Vec jvp(const Vec& x, const Vec& t) const;

  virtual Mat eval_batch(const Mat& X) const;

  Vec operator()(const Vec& x) const { return eval(x); }
};

// Field defined by a callable, with an optional exact jvp.
class AnalyticField : public VelocityField {
 public:
  using Fn = std::function<Vec(const Vec&)>;
  using JvpFn = std::function<Vec(const Vec&, const Vec&)>;

  AnalyticField(int dim, Fn fn, JvpFn jvp = nullptr)
      : dim_(dim), fn_(std::move(fn)), jvp_(std::move(jvp)) {}

  int dim() const override { return dim_; }
  Vec eval(const Vec& x) const override { return fn_(x); }
  Vec jvp(const Vec& x, const Vec& t) const override {
    return jvp_ ? jvp_(x, t) : VelocityField::jvp(x, t);
  }

 private:
  int dim_;
  Fn fn_;
  JvpFn jvp_;
};

// v(x) = A x.
class LinearField : public VelocityField {
 public:
  explicit LinearField(Mat A) : A_(std::move(A)) {
    require(A_.rows() == A_.cols(), "LinearField: A must be square");
  }

  int dim() const override { return static_cast<int>(A_.rows()); }
  Vec eval(const Vec& x) const override { return A_ * x; }
  Vec jvp(const Vec&, const Vec& t) const override { return A_ * t; }
  Mat eval_batch(const Mat& X) const override { return A_ * X; }
  const Mat& matrix() const { return A_; }

 private:
  Mat A_;
};

}  // namespace eqflow
