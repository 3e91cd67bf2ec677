#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "eqflow/gray_scott.hpp"
#include "eqflow/ode.hpp"
#include "eqflow/systems.hpp"

using namespace eqflow;

TEST_CASE("ring samples have the stated radius") {
  Rng rng(1);
  Mat X = sample_toy2d("ring", 10000, rng);
  double mean_r = X.colwise().norm().mean();
  CHECK(mean_r == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("two-gaussian mixture is balanced") {
  Rng rng(2);
  Mat X = sample_toy2d("two_gaussians", 10000, rng);
  CHECK(X.rowwise().mean().cwiseAbs().maxCoeff() < 0.05);
  // modes sit near +-1.5 on the x axis
  double hi = 0, lo = 0;
  int nh = 0, nl = 0;
  for (int j = 0; j < X.cols(); ++j) {
    if (X(0, j) > 0) {
      hi += X(0, j);
      ++nh;
    } else {
      lo += X(0, j);
      ++nl;
    }
  }
  CHECK(hi / nh == doctest::Approx(1.5).epsilon(0.05));
  CHECK(lo / nl == doctest::Approx(-1.5).epsilon(0.05));
}

TEST_CASE("two moons center and sampler edge cases") {
  Rng rng(3);
  Mat X = sample_toy2d("two_moons", 20000, rng);
  // analytic mixture mean: ((0 + 1)/2, (2/pi + 0.5 - 2/pi)/2)
  CHECK(X.row(0).mean() == doctest::Approx(0.5).epsilon(0.05));
  CHECK(X.row(1).mean() == doctest::Approx(0.25).epsilon(0.1));

  Mat one = sample_toy2d("ring", 1, rng);
  CHECK(one.cols() == 1);
  CHECK(one.col(0).allFinite());
  CHECK_THROWS_AS(sample_toy2d("spiral", 10, rng), InputError);
}

TEST_CASE("lorenz derivative values") {
  LorenzParams p;
  CHECK(lorenz_derivative(Vec::Zero(3), p).norm() == 0.0);

  double c = std::sqrt(p.beta * (p.rho - 1.0));
  Vec fixed(3);
  fixed << c, c, p.rho - 1.0;
  CHECK(c == doctest::Approx(8.4853).epsilon(1e-4));
  CHECK(lorenz_derivative(fixed, p).norm() < 1e-12);

  Vec x(3);
  x << 1, 0, 0;
  Vec d = lorenz_derivative(x, p);
  CHECK(d[0] == doctest::Approx(-10.0));
  CHECK(d[1] == doctest::Approx(28.0));
  CHECK(d[2] == doctest::Approx(0.0));
}

TEST_CASE("lorenz jvp matches finite differences") {
  LorenzField f;
  Rng rng(4);
  Vec x = rng.normal_vec(3) * 5.0;
  Vec t = rng.normal_vec(3);
  double h = 1e-6;
  Vec fd = (f.eval(x + h * t) - f.eval(x - h * t)) / (2 * h);
  CHECK((f.jvp(x, t) - fd).norm() < 1e-5);
}

TEST_CASE("nearby lorenz trajectories diverge") {
  LorenzField f;
  Vec a(3), b(3);
  a << 1.0, 1.0, 20.0;
  b = a;
  b[0] += 1e-8;
  bool separated = false;
  for (int i = 0; i < 2500 && !separated; ++i) {
    a = rk4_step(f, a, 0.01);
    b = rk4_step(f, b, 0.01);
    separated = (a - b).norm() > 1.0;
  }
  CHECK(separated);
}

TEST_CASE("lorenz dataset is standardized and reproducible") {
  auto ds = make_lorenz_dataset(2048, 99);
  CHECK(ds.samples.rows() == 3);
  CHECK(ds.samples.cols() == 2048);
  CHECK(ds.samples.rowwise().mean().cwiseAbs().maxCoeff() < 1e-10);
  Vec var = ds.samples.array().square().rowwise().mean();
  CHECK((var.array() - 1.0).abs().maxCoeff() < 1e-10);

  auto ds2 = make_lorenz_dataset(2048, 99);
  CHECK((ds.samples - ds2.samples).cwiseAbs().maxCoeff() == 0.0);
  // z-channel of the attractor lives far from 0 in raw units
  CHECK(ds.mean[2] > 10.0);
}

TEST_CASE("gray-scott presets") {
  auto life = gray_scott_preset("life");
  CHECK(life.Du == 0.16);
  CHECK(life.Dv == 0.08);
  CHECK(life.F == 0.006);
  CHECK(life.kill == 0.045);
  auto maze = gray_scott_preset("maze");
  CHECK(maze.F == 0.029);
  CHECK(maze.kill == 0.057);
  auto wave = gray_scott_preset("wave");
  CHECK(wave.F == 0.018);
  CHECK(wave.kill == 0.049);
  auto spirals = gray_scott_preset("spirals");
  CHECK(spirals.F == 0.007);
  CHECK(spirals.kill == 0.028);
  CHECK_THROWS_AS(gray_scott_preset("bogus"), InputError);
}

TEST_CASE("periodic laplacian basics") {
  Rng rng(5);
  int h = 16, w = 16;
  Vec f = rng.normal_vec(h * w);
  Vec lap(h * w);
  laplacian_periodic(f.data(), h, w, lap.data());
  // telescoping on a torus
  CHECK(std::abs(lap.sum()) < 1e-10 * f.cwiseAbs().sum());

  Vec c = Vec::Constant(h * w, 0.37);
  laplacian_periodic(c.data(), h, w, lap.data());
  CHECK(lap.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gray-scott trivial steady state") {
  Grid g(2, 8, 8);
  g.channel(0).setOnes();
  Grid g2 = gray_scott_step(g, gray_scott_preset("life"), 1.0);
  CHECK((g2.data - g.data).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gray-scott uniform worked example") {
  Grid g(2, 4, 4);
  g.channel(0).setConstant(0.5);
  g.channel(1).setConstant(0.25);
  Grid g2 = gray_scott_step(g, gray_scott_preset("life"), 1.0);
  for (int i = 0; i < 16; ++i) {
    CHECK(g2.channel(0)[i] - 0.5 == doctest::Approx(-0.02825).epsilon(1e-10));
    CHECK(g2.channel(1)[i] - 0.25 == doctest::Approx(0.0185).epsilon(1e-10));
  }
}

TEST_CASE("all presets stay bounded from standard seeds") {
  for (const auto& name : gray_scott_preset_names()) {
    auto p = gray_scott_preset(name);
    Rng rng(derive_seed(1234, name));
    Grid g = gray_scott_init(32, 32, rng);
    for (int t = 0; t < 10000; ++t) gray_scott_step_inplace(g, p, 1.0);
    CAPTURE(name);
    CHECK(g.data.minCoeff() > -0.01);
    CHECK(g.data.maxCoeff() < 1.5);
  }
}

TEST_CASE("turing dataset determinism and shape") {
  auto p = gray_scott_preset("maze");
  auto a = generate_turing_dataset(p, 2, 16, 16, 50, 7);
  auto b = generate_turing_dataset(p, 2, 16, 16, 50, 7);
  REQUIRE(a.size() == 2);
  CHECK(a[0].c == 2);
  CHECK(a[0].h == 16);
  CHECK((a[0].data - b[0].data).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a[1].data - b[1].data).cwiseAbs().maxCoeff() == 0.0);
  // different runs differ
  CHECK((a[0].data - a[1].data).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("gray-scott init splotch count stays in range") {
  for (int s = 0; s < 20; ++s) {
    Rng rng(s);
    Grid g = gray_scott_init(24, 24, rng);
    CHECK((g.channel(0).array() == 1.0).all());
    double v_mass = g.channel(1).sum();
    CHECK(v_mass >= 0.5 * 36);          // at least 5 splotches, overlaps allowed
    CHECK(v_mass <= 0.5 * 36 * 20 + 1e-12);
  }
}
