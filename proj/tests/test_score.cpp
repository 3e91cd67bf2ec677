#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "eqflow/rng.hpp"
#include "eqflow/schedule.hpp"
#include "eqflow/score_model.hpp"

using namespace eqflow;

TEST_CASE("cosine schedule boundary and interior values") {
  NoiseSchedule sched;
  CHECK(sched.alpha(0.0) == doctest::Approx(0.9998446).epsilon(1e-6));
  CHECK(sched.alpha(0.0) >= 0.999);
  CHECK(sched.alpha(1.0) == 1e-5);
  CHECK(sched.alpha(0.2) == doctest::Approx(0.898565).epsilon(1e-4));
  CHECK_THROWS_AS(sched.alpha(-0.1), InputError);
  CHECK_THROWS_AS(sched.alpha(1.1), InputError);

  double prev = 2.0;
  for (int i = 0; i <= 100; ++i) {
    double a = sched.alpha(i / 100.0);
    CHECK(a <= prev);
    prev = a;
  }
}

TEST_CASE("tau_for_alpha inverts the schedule") {
  NoiseSchedule sched;
  CHECK(sched.tau_for_alpha(sched.alpha(0.3)) == doctest::Approx(0.3).epsilon(1e-5));
  CHECK(sched.tau_for_alpha(0.95) == doctest::Approx(0.13672).epsilon(1e-3));
  for (double a : {0.9, 0.95, 0.5, 0.2, 0.05}) {
    double tau = sched.tau_for_alpha(a);
    CHECK(std::abs(sched.alpha(tau) - a) <= 1e-6);
  }
  // monotone boundary: alpha near 1 maps to tau near 0
  CHECK(sched.tau_for_alpha(0.99999) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK_THROWS_AS(sched.tau_for_alpha(0.0), InputError);
  CHECK_THROWS_AS(sched.tau_for_alpha(1.0), InputError);
}

TEST_CASE("diffuse arithmetic") {
  Vec x0(1), eps(1);
  x0 << 2.0;
  eps << -1.0;
  CHECK(diffuse(x0, 1.0, eps)[0] == doctest::Approx(2.0));
  CHECK(diffuse(x0, 0.25, eps)[0] == doctest::Approx(0.13397).epsilon(1e-4));
  CHECK(diffuse(x0, 1e-12, eps)[0] == doctest::Approx(-1.0).epsilon(1e-5));
}

TEST_CASE("diffused whitened data keeps unit component variance") {
  Rng rng(11);
  Mat X0 = rng.normal_mat(3, 4000);
  NoiseSchedule sched;
  for (double tau : {0.1, 0.3, 0.6, 0.9}) {
    double a = sched.alpha(tau);
    Mat eps = rng.normal_mat(3, 4000);
    Mat Xt = diffuse(X0, a, eps);
    Vec var = Xt.array().square().rowwise().mean();
    for (int i = 0; i < 3; ++i) CHECK(var[i] == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("x0 inversion identities are exact") {
  Rng rng(12);
  Mat X0 = rng.normal_mat(2, 10);
  Mat eps = rng.normal_mat(2, 10);
  double a = 0.83;
  Mat Xt = diffuse(X0, a, eps);

  Mat rec_eps = x0_from_prediction(Objective::Eps, Xt, eps, a);
  CHECK((rec_eps - X0).cwiseAbs().maxCoeff() < 1e-12);

  Mat v = std::sqrt(a) * eps - std::sqrt(1.0 - a) * X0;
  Mat rec_v = x0_from_prediction(Objective::V, Xt, v, a);
  CHECK((rec_v - X0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("score vanishes on-manifold and scales off it") {
  // s = (sqrt(a) x0 - x) / (1 - a): zero when x = sqrt(a) x0
  double a = 0.9;
  Vec x0(2);
  x0 << 0.4, -1.2;
  Vec x = std::sqrt(a) * x0;
  Vec s = (std::sqrt(a) * x0 - x) / (1.0 - a);
  CHECK(s.norm() < 1e-14);
}

TEST_CASE("objective parsing") {
  CHECK(parse_objective("eps") == Objective::Eps);
  CHECK(parse_objective("v") == Objective::V);
  CHECK_THROWS_AS(parse_objective("x0"), InputError);
  CHECK(objective_name(Objective::V) == "v");
}

TEST_CASE("denoiser trained on a point mass recovers the noise") {
  // copies of the origin; the optimal eps-predictor is x_tau / sqrt(1-a)
  Mat samples = Mat::Zero(1, 256);
  NoiseSchedule sched;
  DenoiserTrainConfig cfg;
  cfg.epochs = 6000;
  cfg.batch = 256;
  cfg.hidden = {64, 64};
  cfg.seed = 3;
  TrainLog log;
  DenseDenoiser model = train_denoiser(samples, sched, Objective::Eps, cfg, &log);

  CHECK(log.final_loss < 0.05);
  CHECK(log.final_loss < 0.05 * log.epoch_loss.front());

  Rng rng(13);
  for (int i = 0; i < 20; ++i) {
    double tau = rng.uniform(0.2, 0.8);
    double a = sched.alpha(tau);
    Vec x(1);
    x << rng.normal() * std::sqrt(1.0 - a);
    Vec eps_hat = model.predict(x, tau);
    CHECK(std::abs(eps_hat[0] - x[0] / std::sqrt(1.0 - a)) < 0.1);
    // predict_x0 collapses to the training point; the inversion divides
    // the eps-hat error by sqrt(alpha), so the bound widens with tau
    Vec x0 = predict_x0(model, sched, x, tau);
    CHECK(std::abs(x0[0]) < 0.1 / std::sqrt(a));
  }
}

TEST_CASE("training is deterministic given the seed") {
  Rng rng(14);
  Mat samples = rng.normal_mat(2, 128);
  NoiseSchedule sched;
  DenoiserTrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch = 32;
  cfg.hidden = {16, 16};
  cfg.seed = 77;
  TrainLog la, lb;
  DenseDenoiser a = train_denoiser(samples, sched, Objective::V, cfg, &la);
  DenseDenoiser b = train_denoiser(samples, sched, Objective::V, cfg, &lb);
  REQUIRE(la.epoch_loss.size() == lb.epoch_loss.size());
  for (size_t i = 0; i < la.epoch_loss.size(); ++i)
    CHECK(la.epoch_loss[i] == lb.epoch_loss[i]);
  CHECK((a.net().params() - b.net().params()).cwiseAbs().maxCoeff() == 0.0);
}

namespace {

// Shared whitened Gaussian dataset and models, trained once: the score
// error at alpha=0.95 is amplified ~1/sqrt(1-alpha), so the dataset has
// to be large enough for the smoothed empirical score to be tight.
const Mat& gaussian_data() {
  static const Mat samples = [] {
    Rng rng(15);
    Mat s = rng.normal_mat(2, 8192);
    Vec mu = s.rowwise().mean();
    s.colwise() -= mu;
    Vec sd = s.array().square().rowwise().mean().sqrt();
    s = sd.cwiseInverse().asDiagonal() * s;
    return s;
  }();
  return samples;
}

const DenseDenoiser& gaussian_model(Objective obj) {
  static const NoiseSchedule sched;
  static const DenoiserTrainConfig cfg = [] {
    DenoiserTrainConfig c;
    c.epochs = 700;
    c.batch = 256;
    c.hidden = {64, 64};
    c.seed = 5;
    return c;
  }();
  static const DenseDenoiser eps_model =
      train_denoiser(gaussian_data(), sched, Objective::Eps, cfg);
  static const DenseDenoiser v_model =
      train_denoiser(gaussian_data(), sched, Objective::V, cfg);
  return obj == Objective::Eps ? eps_model : v_model;
}

}  // namespace

TEST_CASE("gaussian data give the analytic score") {
  NoiseSchedule sched;
  const DenseDenoiser& model = gaussian_model(Objective::Eps);

  Rng test_rng(16);
  double rel_sum = 0.0;
  int count = 0;
  while (count < 64) {
    Vec x = test_rng.normal_vec(2);
    double r = x.norm();
    if (r < 0.5 || r > 2.0) continue;
    Vec s = score(model, sched, x, 0.95);
    rel_sum += (s + x).norm() / r;
    ++count;
  }
  CHECK(rel_sum / count <= 0.15);

  ScoreField sf(model, sched, 0.95);
  CHECK(sf.alpha() == 0.95);
  Vec probe(2);
  probe << 1.0, 0.5;
  CHECK((sf.eval(probe) - score(model, sched, probe, 0.95)).norm() == 0.0);
}

TEST_CASE("eps- and v-trained scores agree") {
  NoiseSchedule sched;
  const DenseDenoiser& me = gaussian_model(Objective::Eps);
  const DenseDenoiser& mv = gaussian_model(Objective::V);

  Rng test_rng(18);
  Mat X = test_rng.normal_mat(2, 128);
  Mat se = score_batch(me, sched, X, 0.95);
  Mat sv = score_batch(mv, sched, X, 0.95);
  Eigen::Map<Vec> fe(se.data(), se.size());
  Eigen::Map<Vec> fv(sv.data(), sv.size());
  double cosine = fe.dot(fv) / (fe.norm() * fv.norm());
  CHECK(cosine >= 0.95);
}
