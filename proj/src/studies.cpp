#include "eqflow/studies.hpp"

#include <cmath>

#include "eqflow/gray_scott.hpp"
#include "eqflow/langevin.hpp"

namespace eqflow {

double mean_of(const std::vector<double>& v) {
  require(!v.empty(), "mean_of: empty");
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  double m = mean_of(v);
  double s = 0;
  for (double x : v) s += sq(x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

RingStudyResult ring_preservation_study(const RingStudyConfig& cfg) {
  NoiseSchedule sched;
  Rng data_rng(derive_seed(cfg.seed, "ring_data"));
  Mat X = sample_toy2d("ring", cfg.n_train, data_rng);

  DenoiserTrainConfig dcfg;
  dcfg.epochs = cfg.denoiser_epochs;
  dcfg.hidden = cfg.hidden;
  dcfg.seed = derive_seed(cfg.seed, "ring_denoiser");
  DenseDenoiser denoiser = train_denoiser(X, sched, Objective::Eps, dcfg);

  FlowTrainConfig fcfg;
  fcfg.epochs = cfg.flow_epochs;
  fcfg.hidden = cfg.hidden;
  fcfg.alpha = cfg.alpha;
  fcfg.seed = derive_seed(cfg.seed, "ring_flow");
  FlowTrainResult flow = train_flow(X, denoiser, sched, fcfg);

  Rng eval_rng(derive_seed(cfg.seed, "ring_eval"));
  Mat Xe = sample_toy2d("ring", cfg.n_eval, eval_rng);
  Rng floor_rng(derive_seed(cfg.seed, "ring_floor"));
  Mat Xf = sample_toy2d("ring", cfg.n_eval, floor_rng);

  RingStudyResult out;
  Standardizer st = fit_standardizer(Xe);
  out.noise_floor = mmd_rbf(st.apply(Xe), st.apply(Xf));
  out.trained_curve =
      preservation_curve(flow.net, Xe, cfg.steps, cfg.dt, cfg.every);

  VelocityNetConfig rcfg;
  rcfg.dim = 2;
  rcfg.hidden = cfg.hidden;
  rcfg.seed = derive_seed(cfg.seed, "ring_random");
  VelocityNetwork random_net(rcfg);
  out.random_curve =
      preservation_curve(random_net, Xe, cfg.steps, cfg.dt, cfg.every);

  out.net = std::move(flow.net);
  out.report = std::move(flow.report);
  return out;
}

LorenzStudyResult lorenz_study(const LorenzStudyConfig& cfg) {
  NoiseSchedule sched;
  LorenzStudyResult out;

  // reference frame: one dataset fixes the standardization for every
  // field so fingerprints are comparable across models
  LorenzDataset ref =
      make_lorenz_dataset(cfg.n_samples, derive_seed(cfg.seed, "lorenz_ref"));
  LorenzField truth_raw;
  AnalyticField truth(3, [&](const Vec& y) -> Vec {
    Vec x = ref.mean + ref.stddev.cwiseProduct(y);
    return truth_raw.eval(x).cwiseQuotient(ref.stddev);
  });

  out.lambda_truth = lyapunov_max(truth, ref.samples.col(0), 1e-8, cfg.lyap_dt,
                                  cfg.lyap_steps);

  Mat probes = make_probes(ref.samples, cfg.n_probes);
  DynamicsFingerprint e_truth = fingerprint(truth, probes);

  std::vector<DynamicsFingerprint> learned, random;
  for (int k = 0; k < cfg.n_seeds; ++k) {
    LorenzDataset ds = make_lorenz_dataset(
        cfg.n_samples, derive_seed(cfg.seed, "lorenz_data", k));
    // restate in the reference frame
    Mat raw = (ds.stddev.asDiagonal() * ds.samples).colwise() + ds.mean;
    Mat Y = ref.stddev.cwiseInverse().asDiagonal() * (raw.colwise() - ref.mean);

    DenoiserTrainConfig dcfg;
    dcfg.epochs = cfg.denoiser_epochs;
    dcfg.hidden = cfg.hidden;
    dcfg.seed = derive_seed(cfg.seed, "lorenz_denoiser", k);
    DenseDenoiser denoiser = train_denoiser(Y, sched, Objective::Eps, dcfg);

    FlowTrainConfig fcfg;
    fcfg.epochs = cfg.flow_epochs;
    fcfg.hidden = cfg.hidden;
    fcfg.alpha = cfg.alpha;
    fcfg.seed = derive_seed(cfg.seed, "lorenz_flow", k);
    FlowTrainResult flow = train_flow(Y, denoiser, sched, fcfg);

    out.lambda_learned.push_back(lyapunov_max(
        flow.net, Y.col(0), 1e-8, cfg.lyap_dt, cfg.lyap_steps));
    learned.push_back(fingerprint(flow.net, probes));

    VelocityNetConfig rcfg;
    rcfg.dim = 3;
    rcfg.hidden = cfg.hidden;
    rcfg.seed = derive_seed(cfg.seed, "lorenz_random", k);
    random.push_back(fingerprint(VelocityNetwork(rcfg), probes));
  }

  for (int k = 0; k < cfg.n_seeds; ++k) {
    out.sim_learned_truth.push_back(
        cosine_similarity(align_sign(learned[k], e_truth), e_truth));
    out.sim_random_truth.push_back(
        cosine_similarity(align_sign(random[k], e_truth), e_truth));
  }

  std::vector<double> pair_learned, pair_random;
  for (int i = 0; i < cfg.n_seeds; ++i)
    for (int j = i + 1; j < cfg.n_seeds; ++j) {
      pair_learned.push_back(
          cosine_similarity(align_sign(learned[i], learned[j]), learned[j]));
      pair_random.push_back(
          cosine_similarity(align_sign(random[i], random[j]), random[j]));
    }
  out.mean_pair_learned = mean_of(pair_learned);
  out.mean_pair_random = mean_of(pair_random);
  return out;
}

TuringStudyResult turing_recovery_study(const TuringStudyConfig& cfg) {
  NoiseSchedule sched;
  GrayScottParams truth = gray_scott_preset(cfg.preset);

  std::vector<Grid> data = generate_turing_dataset(
      truth, cfg.n_samples, cfg.hw, cfg.hw, cfg.burn_in,
      derive_seed(cfg.seed, "turing_data"), cfg.dt, cfg.jobs);

  GridTrainConfig tcfg = cfg.train;
  tcfg.seed = derive_seed(cfg.seed, "turing_score");
  GridDenoiser model = train_grid_denoiser(data, sched, Objective::Eps, tcfg);

  Grid init = generate_turing_dataset(truth, 1, cfg.hw, cfg.hw, cfg.burn_in,
                                      derive_seed(cfg.seed, "turing_init"))
                  .front();

  RecoverConfig rcfg;
  rcfg.eta = cfg.eta;
  rcfg.alpha = cfg.alpha;
  rcfg.dt = cfg.dt;
  rcfg.steps = cfg.steps;
  rcfg.seed = derive_seed(cfg.seed, "turing_sde");

  TuringStudyResult out;
  out.recover = recover_turing_dynamics(model, sched, init, truth, rcfg);

  // baselines under the same score, noise stream, and horizon
  GridScoreFn score = [&](const Grid& g) {
    return grid_score(model, sched, g, cfg.alpha);
  };
  DynamicsFingerprint target = change_fingerprint(
      init, [&](const Grid& g) { return gray_scott_step(g, truth, cfg.dt); },
      cfg.steps);

  LangevinConfig lcfg;
  lcfg.eta = cfg.eta;
  lcfg.dt = cfg.dt;
  lcfg.steps = cfg.steps;
  lcfg.seed = rcfg.seed;

  auto drift_similarity = [&](const GridDrift& drift) {
    std::vector<Grid> frames = langevin_rollout(init, drift, score, lcfg);
    int t = 0;
    DynamicsFingerprint fp = change_fingerprint(
        init, [&](const Grid&) { return frames[++t]; }, cfg.steps);
    return cosine_similarity(fp, target);
  };

  Rng krng(derive_seed(cfg.seed, "turing_random_k"));
  for (int j = 0; j < cfg.n_random; ++j)
    out.sim_random.push_back(
        drift_similarity(kernel_drift(random_kernel(2, 0, krng))));
  out.random_mean = mean_of(out.sim_random);
  out.random_std = std_of(out.sim_random);

  Rng wrng(derive_seed(cfg.seed, "turing_reweight"));
  Vec weights = wrng.normal_mat(2, 1).col(0);
  out.sim_reweight = drift_similarity(reweight_drift(weights));

  const Grid& x0 = out.recover.rollout.front();
  const Grid& xT = out.recover.rollout.back();
  out.change_rel_learned = (xT.data - x0.data).norm() / x0.data.norm();
  Grid gt = init;
  for (int t = 0; t < cfg.steps; ++t) gt = gray_scott_step(gt, truth, cfg.dt);
  out.change_rel_truth = (gt.data - init.data).norm() / init.data.norm();
  return out;
}

}  // namespace eqflow
