#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "eqflow/divergence.hpp"
#include "eqflow/field.hpp"
#include "eqflow/mlp.hpp"
#include "eqflow/ode.hpp"
#include "eqflow/positional.hpp"
#include "eqflow/rng.hpp"
#include "eqflow/velocity_net.hpp"

using namespace eqflow;

TEST_CASE("positional encoding at the origin") {
  Vec x = Vec::Zero(2);
  Vec e = positional_encode(x, 0);
  REQUIRE(e.size() == 4);
  CHECK(e[0] == doctest::Approx(0.0));
  CHECK(e[1] == doctest::Approx(0.0));
  CHECK(e[2] == doctest::Approx(1.0));
  CHECK(e[3] == doctest::Approx(1.0));
}

TEST_CASE("positional encoding octave layout") {
  Vec x(2);
  x << 0.3, -1.1;
  int n = 3;
  Vec e = positional_encode(x, n);
  REQUIRE(e.size() == 2 * 2 * (n + 1));
  for (int k = 0; k <= n; ++k) {
    double s = std::pow(2.0, k);
    for (int i = 0; i < 2; ++i) {
      CHECK(e[4 * k + i] == doctest::Approx(std::sin(s * x[i])));
      CHECK(e[4 * k + 2 + i] == doctest::Approx(std::cos(s * x[i])));
    }
  }
  Mat E = encode_with_input(x, n);
  REQUIRE(E.rows() == 2 + e.size());
  CHECK((E.col(0).head(2) - x).norm() == doctest::Approx(0.0));
  CHECK((E.col(0).tail(e.size()) - e).norm() == doctest::Approx(0.0));
}

TEST_CASE("encoding tangent matches finite differences") {
  Rng rng(3);
  Vec x = rng.normal_vec(3);
  Vec t = rng.normal_vec(3);
  double h = 1e-6;
  Mat ep = encode_with_input(x + h * t, 4);
  Mat em = encode_with_input(x - h * t, 4);
  Mat fd = (ep - em) / (2 * h);
  Mat an = encode_with_input_jvp(x, t, 4);
  CHECK((fd - an).norm() < 1e-7 * (1 + an.norm()));
}

TEST_CASE("mlp forward matches a hand-rolled two-layer net") {
  Mlp net({2, 3, 1}, 0);
  Mat W0(3, 2), W1(1, 3);
  W0 << 0.5, -0.2, 0.1, 0.3, -0.4, 0.7;
  W1 << 1.0, -1.0, 0.5;
  Vec b0(3), b1(1);
  b0 << 0.1, 0.0, -0.1;
  b1 << 0.2;
  net.W(0) = W0;
  net.W(1) = W1;
  net.b(0) = b0;
  net.b(1) = b1;

  Vec x(2);
  x << 0.7, -0.3;
  Vec z = W0 * x + b0;
  Vec a(3);
  for (int i = 0; i < 3; ++i) a[i] = z[i] / (1.0 + std::exp(-z[i]));
  double expect = (W1 * a + b1)(0);

  Mat y = net.forward(x);
  CHECK(y(0, 0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("mlp backward agrees with finite-difference gradients") {
  Rng rng(17);
  Mlp net({3, 8, 8, 2}, 17);
  Mat X = rng.normal_mat(3, 5);
  Mat C = rng.normal_mat(2, 5);  // fixed cotangent

  auto loss = [&](const Mlp& m) { return (m.forward(X).array() * C.array()).sum(); };

  Mlp::Cache cache;
  net.forward(X, &cache);
  Vec grad = Vec::Zero(net.n_params());
  net.backward(C, cache, grad);

  // spot-check a spread of parameters
  double h = 1e-6;
  for (int idx : {0, 3, 17, 40, net.n_params() / 2, net.n_params() - 1}) {
    double orig = net.params()[idx];
    net.params()[idx] = orig + h;
    double lp = loss(net);
    net.params()[idx] = orig - h;
    double lm = loss(net);
    net.params()[idx] = orig;
    double fd = (lp - lm) / (2 * h);
    CHECK(grad[idx] == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("mlp forward_jvp agrees with finite differences") {
  Rng rng(23);
  Mlp net({4, 16, 16, 3}, 23);
  Vec x = rng.normal_vec(4);
  Mat T = rng.normal_mat(4, 2);

  Vec y;
  Mat JT;
  net.forward_jvp(x, T, &y, &JT);
  CHECK((y - net.forward(x).col(0)).norm() < 1e-12);

  double h = 1e-6;
  for (int j = 0; j < 2; ++j) {
    Vec t = T.col(j);
    Mat fp = net.forward(x + h * t);
    Mat fm = net.forward(x - h * t);
    Vec fd = (fp - fm) / (2 * h);
    CHECK((fd - JT.col(j)).norm() < 1e-6 * (1 + JT.col(j).norm()));
  }
}

TEST_CASE("divergence of a divergence-free linear field is exactly zero") {
  Mat A(2, 2);
  A << 1, 0, 0, -1;  // v(x, y) = (x, -y)
  LinearField f(A);
  Vec x(2);
  x << 0.3, 0.8;
  CHECK(divergence_exact(f, x) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(divergence_fd(f, x) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("single-probe hutchinson on an axis recovers a diagonal entry") {
  Mat A(2, 2);
  A << 1, 0, 0, -1;
  LinearField f(A);
  Vec x(2);
  x << 0.3, 0.8;
  Mat Z(2, 1);
  Z << 1, 0;
  CHECK(divergence_hutchinson(f, x, Z) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hutchinson estimates the trace of a linear field") {
  Rng rng(31);
  Mat A = rng.normal_mat(3, 3);
  LinearField f(A);
  Vec x = rng.normal_vec(3);
  double tr = A.trace();

  // For a linear field each probe contributes z^T A z, whose expectation
  // is exactly the trace; with many probes the average should be close.
  Rng probes(101);
  double est = divergence_hutchinson(f, x, 4000, probes);
  CHECK(std::abs(est - tr) < 0.25);

  // Agreement across modes on the same field.
  CHECK(divergence_exact(f, x) == doctest::Approx(tr).epsilon(1e-12));
  CHECK(divergence_fd(f, x) == doctest::Approx(tr).epsilon(1e-9));
}

TEST_CASE("finite-difference divergence on a polynomial field") {
  // v = (x^2, x y), div = 2x + x = 3x
  AnalyticField f(2, [](const Vec& p) {
    Vec v(2);
    v << p[0] * p[0], p[0] * p[1];
    return v;
  });
  Vec x(2);
  x << 1.0, 2.0;
  CHECK(divergence_fd(f, x, 1e-3) == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(divergence_exact(f, x) == doctest::Approx(3.0).epsilon(1e-4));
}

TEST_CASE("estimate_divergence reports mode and probes") {
  Mat A = Mat::Identity(2, 2);
  LinearField f(A);
  Vec x = Vec::Zero(2);
  Rng rng(1);
  auto e = estimate_divergence(f, x, DivMode::Hutchinson, 6, &rng);
  CHECK(e.mode == DivMode::Hutchinson);
  CHECK(e.probes == 6);
  // same probe stream, computed by hand: estimate is mean of |z|^2
  Rng rng2(1);
  Mat Z = rng2.normal_mat(2, 6);
  CHECK(e.value ==
        doctest::Approx(Z.colwise().squaredNorm().mean()).epsilon(1e-9));
  CHECK_THROWS_AS(estimate_divergence(f, x, DivMode::Hutchinson, 6, nullptr),
                  InputError);
  CHECK(parse_div_mode("fd") == DivMode::Fd);
  CHECK_THROWS_AS(parse_div_mode("bogus"), InputError);
}

TEST_CASE("rk4 single step on exponential decay") {
  Mat A(1, 1);
  A << -1;
  LinearField f(A);
  Vec x(1);
  x << 1.0;
  Vec y = rk4_step(f, x, 0.1);
  CHECK(y[0] == doctest::Approx(0.9048375).epsilon(1e-9));
  CHECK(std::abs(y[0] - std::exp(-0.1)) < 1e-7);
}

TEST_CASE("rk4 follows a rotation") {
  Mat A(2, 2);
  A << 0, -1, 1, 0;
  LinearField f(A);
  Vec x(2);
  x << 1.0, 0.0;
  auto traj = rk4_trajectory(f, x, 0.01, 100);
  REQUIRE(traj.size() == 101);
  CHECK(traj.back()[0] == doctest::Approx(std::cos(1.0)).epsilon(1e-8));
  CHECK(traj.back()[1] == doctest::Approx(std::sin(1.0)).epsilon(1e-8));
  // batched endpoint agrees
  Mat X = x;
  Mat end = rk4_evolve(f, X, 0.01, 100);
  CHECK((end.col(0) - traj.back()).norm() < 1e-12);
}

TEST_CASE("rk4 flags blow-up as a numerical failure") {
  AnalyticField f(1, [](const Vec& p) {
    Vec v(1);
    v << p[0] * p[0];
    return v;
  });
  Vec x(1);
  x << 50.0;
  CHECK_THROWS_AS(rk4_trajectory(f, x, 1.0, 50), NumericalError);
}

TEST_CASE("velocity network batch-norm output") {
  VelocityNetConfig cfg;
  cfg.dim = 2;
  cfg.pe_octaves = 2;
  cfg.hidden = {16, 16};
  cfg.seed = 5;
  VelocityNetwork net(cfg);

  Rng rng(6);
  Mat X = rng.normal_mat(2, 32);
  Mat V = net.forward_train(X);

  // train mode: every component has zero batch mean and ~unit variance
  Vec mean = V.rowwise().mean();
  CHECK(mean.cwiseAbs().maxCoeff() < 1e-12);
  Vec var = (V.colwise() - mean).array().square().rowwise().mean();
  CHECK(var[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(var[1] == doctest::Approx(1.0).epsilon(1e-3));

  CHECK_THROWS_AS(net.forward_train(X.col(0)), InputError);
}

TEST_CASE("velocity network normalization example") {
  // raw outputs {(1,0),(3,0)} -> mean (2,0), biased var (1,0); with eps
  // the normalized pair is (-1, 0) and (1, 0) up to 1e-5.
  Mat raw(2, 2);
  raw << 1, 3, 0, 0;
  auto st = VelocityNetwork::batch_stats(raw);
  CHECK(st.mean[0] == doctest::Approx(2.0));
  CHECK(st.var[0] == doctest::Approx(1.0));
  Mat norm = st.inv_std.asDiagonal() * (raw.colwise() - st.mean);
  CHECK(norm(0, 0) == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(norm(0, 1) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(norm(1, 0) == doctest::Approx(0.0));
}

TEST_CASE("velocity network infer mode and exact jvp") {
  VelocityNetConfig cfg;
  cfg.dim = 3;
  cfg.pe_octaves = 3;
  cfg.hidden = {24, 24};
  cfg.seed = 8;
  VelocityNetwork net(cfg);
  Rng rng(9);
  net.running_mean() = rng.normal_vec(3);
  net.running_var() = Vec::Ones(3) * 0.7;

  Vec x = rng.normal_vec(3);
  Vec v = net.eval(x);
  Vec expect = (net.raw_forward(x).col(0) - net.running_mean()).cwiseProduct(
      (net.running_var().array() + VelocityNetwork::kEps).rsqrt().matrix());
  CHECK((v - expect).norm() < 1e-12);

  // exact jvp against finite differences
  Vec t = rng.normal_vec(3);
  double h = 1e-6;
  Vec fd = (net.eval(x + h * t) - net.eval(x - h * t)) / (2 * h);
  CHECK((net.jvp(x, t) - fd).norm() < 1e-6 * (1 + fd.norm()));

  // divergence_exact equals trace of the analytic jacobian
  Mat J(3, 3);
  Vec e = Vec::Zero(3);
  for (int a = 0; a < 3; ++a) {
    e[a] = 1;
    J.col(a) = net.jvp(x, e);
    e[a] = 0;
  }
  CHECK(divergence_exact(net, x) == doctest::Approx(J.trace()).epsilon(1e-10));
}
