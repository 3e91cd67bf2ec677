#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "eqflow/gray_scott.hpp"
#include "eqflow/metrics.hpp"
#include "eqflow/rng.hpp"
#include "eqflow/systems.hpp"

using namespace eqflow;

TEST_CASE("mmd basics") {
  Rng rng(1);
  Mat X = rng.normal_mat(2, 64);
  CHECK(mmd_rbf(X, X) == 0.0);

  Mat Y = rng.normal_mat(2, 80);
  CHECK(mmd_rbf(X, Y) == doctest::Approx(mmd_rbf(Y, X)).epsilon(1e-12));
  CHECK(mmd_rbf(X, Y) >= 0.0);
}

TEST_CASE("mmd closed-form point masses") {
  Mat X(1, 1), Y(1, 1);
  X << 0.0;
  Y << 1.0;
  // sqrt(2 - 2 exp(-2)) for sigma = 0.5
  double expect = std::sqrt(2.0 - 2.0 * std::exp(-2.0));
  CHECK(expect == doctest::Approx(1.31504).epsilon(1e-4));
  CHECK(mmd_rbf(X, Y, 0.5) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("mmd separates shifted clouds more than resampled ones") {
  Rng rng(2);
  Mat A = rng.normal_mat(2, 256);
  Mat B = rng.normal_mat(2, 256);
  Mat C = B.colwise() + Vec::Constant(2, 2.0).eval();
  CHECK(mmd_rbf(A, C) > 5.0 * mmd_rbf(A, B));
}

TEST_CASE("preservation curve of the zero field is identically zero") {
  AnalyticField zero(2, [](const Vec&) { return Vec::Zero(2); });
  Rng rng(3);
  Mat X = rng.normal_mat(2, 128);
  auto curve = preservation_curve(zero, X, 100, 0.1, 10);
  REQUIRE(curve.size() == 10);
  CHECK(curve.front().first == doctest::Approx(1.0));
  CHECK(curve.back().first == doctest::Approx(10.0));
  for (auto& [t, m] : curve) CHECK(m == 0.0);
}

TEST_CASE("rotation field preserves an isotropic gaussian") {
  Mat R(2, 2);
  R << 0, -1, 1, 0;
  LinearField rot(R);
  Rng rng(4);
  Mat X = rng.normal_mat(2, 512);
  auto curve = preservation_curve(rot, X, 100, 0.1, 10);

  // sampling-noise floor from two fresh draws of the same distribution
  Mat F1 = rng.normal_mat(2, 512);
  Mat F2 = rng.normal_mat(2, 512);
  Standardizer st = fit_standardizer(F1);
  double floor = mmd_rbf(st.apply(F1), st.apply(F2));
  for (auto& [t, m] : curve) CHECK(m < 3.0 * floor);
}

TEST_CASE("lyapunov on analytic fields") {
  Mat A(1, 1);
  A << -1.0;
  LinearField contract(A);
  Vec x0(1);
  x0 << 1.0;
  double lam = lyapunov_max(contract, x0, 1e-8, 0.01, 2000, 10);
  CHECK(lam == doctest::Approx(-1.0).epsilon(0.05));

  AnalyticField zero(2, [](const Vec&) { return Vec::Zero(2); });
  Vec y0 = Vec::Ones(2);
  CHECK(lyapunov_max(zero, y0, 1e-8, 0.01, 500, 10) == 0.0);
}

TEST_CASE("lyapunov of the lorenz attractor") {
  LorenzField f;
  Vec x0(3);
  x0 << 1.0, 1.0, 20.0;
  double lam = lyapunov_max(f, x0, 1e-8, 0.01, 50000, 10);
  // classical value for sigma=10, rho=28, beta=8/3 is about 0.906
  CHECK(lam == doctest::Approx(0.906).epsilon(0.15));
}

TEST_CASE("fingerprints and alignment") {
  Mat A(2, 2);
  A << 0.2, -1.0, 1.0, 0.3;
  LinearField f(A);
  Rng rng(5);
  Mat probes = rng.normal_mat(2, 32);

  auto e = fingerprint(f, probes);
  CHECK(e.values.size() == 64);
  CHECK_FALSE(e.aligned_to.has_value());
  auto e2 = fingerprint(f, probes);
  CHECK((e.values - e2.values).norm() == 0.0);
  CHECK(e.probe_set_id == e2.probe_set_id);

  LinearField neg(Mat(-A));
  auto en = fingerprint(neg, probes);
  CHECK((en.values + e.values).norm() == 0.0);
  CHECK(cosine_similarity(e, en) == doctest::Approx(-1.0));

  auto aligned = align_sign(en, e);
  CHECK(aligned.aligned_to.has_value());
  CHECK(cosine_similarity(aligned, e) == doctest::Approx(1.0));
  CHECK(aligned.values.dot(e.values) >= 0.0);

  // zero field fingerprint is the zero vector and a tie stays unchanged
  AnalyticField zero(2, [](const Vec&) { return Vec::Zero(2); });
  auto ez = fingerprint(zero, probes);
  CHECK(ez.values.norm() == 0.0);
  auto tie = align_sign(ez, e);
  CHECK((tie.values - ez.values).norm() == 0.0);
  CHECK_THROWS_AS(cosine_similarity(ez, e), InputError);
}

TEST_CASE("mismatched probe sets are rejected") {
  Mat A = Mat::Identity(2, 2);
  LinearField f(A);
  Rng rng(6);
  Mat p1 = rng.normal_mat(2, 16);
  Mat p2 = rng.normal_mat(2, 16);
  auto e1 = fingerprint(f, p1);
  auto e2 = fingerprint(f, p2);
  CHECK_THROWS_AS(cosine_similarity(e1, e2), InputError);
  CHECK_THROWS_AS(align_sign(e1, e2), InputError);
}

TEST_CASE("cosine similarity is scale-invariant") {
  Rng rng(7);
  DynamicsFingerprint a, b;
  a.values = rng.normal_vec(20);
  b.values = rng.normal_vec(20);
  a.probe_set_id = b.probe_set_id = 42;
  double base = cosine_similarity(a, b);
  DynamicsFingerprint a3 = a;
  a3.values *= 3.7;
  CHECK(cosine_similarity(a3, b) == doctest::Approx(base).epsilon(1e-12));
  CHECK(base >= -1.0);
  CHECK(base <= 1.0);
}

TEST_CASE("make_probes takes leading columns") {
  Rng rng(8);
  Mat X = rng.normal_mat(3, 100);
  Mat P = make_probes(X, 10);
  CHECK(P.cols() == 10);
  CHECK((P - X.leftCols(10)).norm() == 0.0);
  CHECK_THROWS_AS(make_probes(X, 101), InputError);
}

TEST_CASE("change fingerprint basics") {
  Grid g(2, 6, 6);
  Rng rng(9);
  g.data = rng.normal_vec(g.size());

  GridStepper identity = [](const Grid& x) { return x; };
  auto e0 = change_fingerprint(g, identity, 0);
  CHECK(e0.values.norm() == 0.0);
  auto eid = change_fingerprint(g, identity, 25);
  CHECK(eid.values.norm() == 0.0);

  // different T or different initial state -> not comparable
  auto eT = change_fingerprint(g, identity, 26);
  CHECK_THROWS_AS(cosine_similarity(e0, eT), InputError);
}

TEST_CASE("maze change is small relative to life change") {
  int h = 32, w = 32;
  auto run = [&](const std::string& name) {
    auto p = gray_scott_preset(name);
    Rng rng(derive_seed(4321, name));
    Grid g = gray_scott_init(h, w, rng);
    for (int t = 0; t < 4000; ++t) gray_scott_step_inplace(g, p, 1.0);
    GridStepper stepper = [p](const Grid& x) {
      return gray_scott_step(x, p, 1.0);
    };
    return change_fingerprint(g, stepper, 50).values.norm();
  };
  double maze_change = run("maze");
  double life_change = run("life");
  CHECK(maze_change < 0.1 * life_change);
}
