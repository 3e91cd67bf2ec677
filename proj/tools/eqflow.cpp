// Command-line front end for the toolkit: dataset generation, denoiser
// and flow training, training-free recovery, rollouts, evaluation
// studies, and the pattern-placement pipeline. Every artifact is
// written atomically and gets a JSON manifest echoing the resolved
// configuration. Exit codes: 0 success, 2 bad input, 3 numerical
// failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eqflow/alife.hpp"
#include "eqflow/conv_denoiser.hpp"
#include "eqflow/flow.hpp"
#include "eqflow/gray_scott.hpp"
#include "eqflow/io.hpp"
#include "eqflow/langevin.hpp"
#include "eqflow/metrics.hpp"
#include "eqflow/recover.hpp"
#include "eqflow/score_model.hpp"
#include "eqflow/skew.hpp"
#include "eqflow/studies.hpp"
#include "eqflow/systems.hpp"

namespace {

using namespace eqflow;

std::string show(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string show(const std::vector<int>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::string show(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

using Config = std::map<std::string, std::string>;

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
  atomic_write(path, [&](std::ostream& os) {
    os.precision(17);
    os << header << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        os << (i ? "," : "") << row[i];
      os << "\n";
    }
  });
}

void write_loss_csv(const std::string& path, const TrainLog& log) {
  std::vector<std::vector<double>> rows;
  rows.reserve(log.epoch_loss.size());
  for (std::size_t e = 0; e < log.epoch_loss.size(); ++e)
    rows.push_back({static_cast<double>(e), log.epoch_loss[e]});
  write_csv(path, "epoch,loss", rows);
}

// Metric-per-row CSV: a name column followed by numeric fields.
void write_metric_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
  atomic_write(path, [&](std::ostream& os) {
    os.precision(17);
    os << "metric,values\n";
    for (const auto& [name, vals] : rows) {
      os << name;
      for (double v : vals) os << "," << v;
      os << "\n";
    }
  });
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Applies a plain key=value file to a parsed subcommand. Only options
// absent from the command line are touched, so flags win. Keys are the
// long option names without the leading dashes; '#' starts a comment.
void apply_config(CLI::App* sub, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  require(in.good(), "config: cannot open " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string here = path + ":" + std::to_string(lineno);
    std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    require(eq != std::string::npos, here + ": expected key=value");
    std::string key = trim(stripped.substr(0, eq));
    std::string val = trim(stripped.substr(eq + 1));
    require(!key.empty(), here + ": empty key");
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    require(opt != nullptr, here + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;  // command line takes precedence
    opt->add_result(val);
    try {
      opt->run_callback();
    } catch (const CLI::ParseError& e) {
      throw InputError(here + ": " + e.what());
    }
  }
}


std::vector<double> parse_gammas(const std::string& s) {
  if (s == "both") return {1.0, -1.0};
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      double g = std::stod(tok, &used);
      require(used == tok.size(), "trailing characters");
      out.push_back(g);
    } catch (const std::exception&) {
      throw InputError("--gamma: expected 'both' or a comma-separated "
                       "list of numbers, got '" + s + "'");
    }
  }
  require(!out.empty(), "--gamma: empty list");
  return out;
}

// ---------------------------------------------------------------- gen-data

struct GenDataOpts {
  std::string config;
  std::string system;
  std::string preset = "life";
  int n = 0;
  int grid = 64;
  int burn_in = 4000;
  double dt = 1.0;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
};

void run_gen_data(const GenDataOpts& o) {
  require(!o.system.empty(), "gen-data: --system is required");
  require(!o.out.empty(), "gen-data: --out is required");
  require(o.n >= 1, "gen-data: --n must be >= 1");
  Config cfg{{"system", o.system}, {"n", std::to_string(o.n)},
             {"seed", std::to_string(o.seed)}};
  if (o.system == "gray-scott") {
    GrayScottParams p = gray_scott_preset(o.preset);
    cfg["preset"] = o.preset;
    cfg["grid"] = std::to_string(o.grid);
    cfg["burn_in"] = std::to_string(o.burn_in);
    cfg["dt"] = show(o.dt);
    cfg["jobs"] = std::to_string(o.jobs);
    std::vector<Grid> grids = generate_turing_dataset(
        p, o.n, o.grid, o.grid, o.burn_in, o.seed, o.dt, o.jobs);
    write_dataset(o.out, grids);
    std::cout << "gen-data: wrote " << o.n << " grids (" << grids[0].c << "x"
              << o.grid << "x" << o.grid << ") to " << o.out << "\n";
  } else if (o.system == "lorenz") {
    LorenzDataset ds = make_lorenz_dataset(o.n, o.seed);
    cfg["mean"] = show(std::vector<double>(ds.mean.data(),
                                           ds.mean.data() + ds.mean.size()));
    cfg["stddev"] = show(std::vector<double>(
        ds.stddev.data(), ds.stddev.data() + ds.stddev.size()));
    write_dataset(o.out, ds.samples);
    std::cout << "gen-data: wrote " << o.n << " standardized states (3x"
              << o.n << ") to " << o.out << "\n";
  } else {
    Rng rng(o.seed);
    Mat X = sample_toy2d(o.system, o.n, rng);
    write_dataset(o.out, X);
    std::cout << "gen-data: wrote " << o.n << " samples (2x" << o.n
              << ") to " << o.out << "\n";
  }
  write_manifest(o.out, "gen-data", cfg);
}

void setup_gen_data(CLI::App& app) {
  auto o = std::make_shared<GenDataOpts>();
  CLI::App* sub = app.add_subcommand(
      "gen-data", "Sample a dataset (vector systems or simulator grids)");
  sub->add_option("--config", o->config, "key=value defaults; flags win");
  sub->add_option("--system", o->system,
                  "two_gaussians | ring | two_moons | lorenz | gray-scott "
                  "(required)");
  sub->add_option("--preset", o->preset,
                  "gray-scott preset: life | wave | spirals | maze");
  sub->add_option("--n", o->n, "number of samples (required)");
  sub->add_option("--grid", o->grid, "gray-scott lattice side");
  sub->add_option("--burn-in", o->burn_in, "gray-scott burn-in steps");
  sub->add_option("--dt", o->dt, "gray-scott integrator step");
  sub->add_option("--seed", o->seed, "rng seed");
  sub->add_option("--jobs", o->jobs, "worker threads for independent runs");
  sub->add_option("--out", o->out, "output dataset path (required)");
  sub->callback([o, sub]() {
    apply_config(sub, o->config);
    run_gen_data(*o);
  });
}

// -------------------------------------------------------------- train-score

struct TrainScoreOpts {
  std::string config;
  std::string data;
  std::string objective = "eps";
  int epochs = -1;  // default depends on the dataset kind
  int batch = -1;
  double lr = 1e-3;
  double tau_min = 0.01;
  double ema = 0.999;
  std::uint64_t seed = 0;
  int pe = 4;
  std::vector<int> hidden = {128, 128, 128};
  std::vector<int> widths = {16, 32, 64};
  std::string out;
};

void run_train_score(const TrainScoreOpts& o) {
  require(!o.data.empty(), "train-score: --data is required");
  require(!o.out.empty(), "train-score: --out is required");
  Dataset ds = read_dataset(o.data);
  Objective obj = parse_objective(o.objective);
  NoiseSchedule sched;
  TrainLog log;
  Config cfg{{"data", o.data},
             {"objective", objective_name(obj)},
             {"lr", show(o.lr)},
             {"tau_min", show(o.tau_min)},
             {"ema_decay", show(o.ema)},
             {"seed", std::to_string(o.seed)}};
  if (ds.is_grid()) {
    GridTrainConfig tc;
    tc.epochs = o.epochs < 0 ? tc.epochs : o.epochs;
    tc.batch = o.batch < 0 ? tc.batch : o.batch;
    tc.lr = o.lr;
    tc.tau_min = o.tau_min;
    tc.ema_decay = o.ema;
    tc.seed = o.seed;
    tc.widths = o.widths;
    cfg["epochs"] = std::to_string(tc.epochs);
    cfg["batch"] = std::to_string(tc.batch);
    cfg["widths"] = show(tc.widths);
    GridDenoiser m = train_grid_denoiser(ds.grids, sched, obj, tc, &log);
    save_denoiser(o.out, m);
  } else {
    DenoiserTrainConfig tc;
    tc.epochs = o.epochs < 0 ? tc.epochs : o.epochs;
    tc.batch = o.batch < 0 ? tc.batch : o.batch;
    tc.lr = o.lr;
    tc.tau_min = o.tau_min;
    tc.ema_decay = o.ema;
    tc.seed = o.seed;
    tc.pe_octaves = o.pe;
    tc.hidden = o.hidden;
    cfg["epochs"] = std::to_string(tc.epochs);
    cfg["batch"] = std::to_string(tc.batch);
    cfg["pe_octaves"] = std::to_string(tc.pe_octaves);
    cfg["hidden"] = show(tc.hidden);
    DenseDenoiser m = train_denoiser(ds.vectors, sched, obj, tc, &log);
    save_denoiser(o.out, m);
  }
  write_loss_csv(o.out + ".loss.csv", log);
  write_manifest(o.out, "train-score", cfg, {o.data});
  std::cout << "train-score: final loss " << log.final_loss << ", model at "
            << o.out << "\n";
}

void setup_train_score(CLI::App& app) {
  auto o = std::make_shared<TrainScoreOpts>();
  CLI::App* sub = app.add_subcommand(
      "train-score", "Train a denoiser on a dataset (MLP for vector data, "
                     "convolutional for grids)");
  sub->add_option("--config", o->config, "key=value defaults; flags win");
  sub->add_option("--data", o->data, "dataset path (required)");
  sub->add_option("--objective", o->objective, "eps | v");
  sub->add_option("--epochs", o->epochs, "default 2000 dense / 50 grid");
  sub->add_option("--batch", o->batch, "default 256 dense / 16 grid");
  sub->add_option("--lr", o->lr, "Adam learning rate (cosine decay)");
  sub->add_option("--tau-min", o->tau_min, "smallest training time");
  sub->add_option("--ema", o->ema, "weight EMA decay (0 disables)");
  sub->add_option("--seed", o->seed, "rng seed");
  sub->add_option("--pe", o->pe, "Fourier octaves (dense model)");
  sub->add_option("--hidden", o->hidden, "dense hidden widths")
      ->delimiter(',');
  sub->add_option("--widths", o->widths, "grid encoder widths")
      ->delimiter(',');
  sub->add_option("--out", o->out, "output model path (required)");
  sub->callback([o, sub]() {
    apply_config(sub, o->config);
    run_train_score(*o);
  });
}

// --------------------------------------------------------------- train-flow

struct TrainFlowOpts {
  std::string config;
  std::string data;
  std::string score;
  double alpha = 0.95;
  int epochs = 2000;
  int batch = 256;
  double lr = 1e-3;
  std::string div = "fd";
  int k = 4;
  double fd_h = 1e-3;
  double hutch_h = 1e-4;
  int pe = 4;
  std::vector<int> hidden = {128, 128, 128};
  std::uint64_t seed = 0;
  std::string out;
};

void run_train_flow(const TrainFlowOpts& o) {
  require(!o.data.empty(), "train-flow: --data is required");
  require(!o.score.empty(), "train-flow: --score is required");
  require(!o.out.empty(), "train-flow: --out is required");
  Dataset ds = read_dataset(o.data);
  require(!ds.is_grid(), "train-flow: expects a vector dataset");
  LoadedDenoiser ld = load_denoiser(o.score);
  require(ld.kind == 0, "train-flow: expects a dense score model");
  NoiseSchedule sched;
  FlowTrainConfig cfg;
  cfg.epochs = o.epochs;
  cfg.batch = o.batch;
  cfg.lr = o.lr;
  cfg.k_probes = o.k;
  cfg.div_mode = parse_div_mode(o.div);
  cfg.fd_h = o.fd_h;
  cfg.hutch_h = o.hutch_h;
  cfg.alpha = o.alpha;
  cfg.seed = o.seed;
  cfg.pe_octaves = o.pe;
  cfg.hidden = o.hidden;
  FlowTrainResult r = train_flow(ds.vectors, ld.dense, sched, cfg);
  save_velocity_net(o.out, r.net);
  write_loss_csv(o.out + ".loss.csv", r.log);
  Config m{{"data", o.data},
           {"score", o.score},
           {"alpha", show(o.alpha)},
           {"epochs", std::to_string(o.epochs)},
           {"batch", std::to_string(o.batch)},
           {"lr", show(o.lr)},
           {"div", div_mode_name(cfg.div_mode)},
           {"k_probes", std::to_string(o.k)},
           {"fd_h", show(o.fd_h)},
           {"hutch_h", show(o.hutch_h)},
           {"pe_octaves", std::to_string(o.pe)},
           {"hidden", show(o.hidden)},
           {"seed", std::to_string(o.seed)},
           {"mean_sq_residual", show(r.report.mean_sq_residual)},
           {"mean_speed", show(r.report.mean_speed)},
           {"trivial", r.report.trivial ? "true" : "false"}};
  write_manifest(o.out, "train-flow", m, {o.data, o.score});
  std::cout << "train-flow: mean squared residual "
            << r.report.mean_sq_residual << ", mean speed "
            << r.report.mean_speed
            << (r.report.trivial ? " (TRIVIAL: collapsed field)" : "")
            << ", model at " << o.out << "\n";
}

void setup_train_flow(CLI::App& app) {
  auto o = std::make_shared<TrainFlowOpts>();
  CLI::App* sub = app.add_subcommand(
      "train-flow", "Distill a score model into an equilibrium velocity "
                    "field by minimizing the continuity residual");
  sub->add_option("--config", o->config, "key=value defaults; flags win");
  sub->add_option("--data", o->data, "vector dataset path (required)");
  sub->add_option("--score", o->score, "dense score model path (required)");
  sub->add_option("--alpha", o->alpha, "working noise level");
  sub->add_option("--epochs", o->epochs, "training epochs");
  sub->add_option("--batch", o->batch, "batch size");
  sub->add_option("--lr", o->lr, "Adam learning rate (cosine decay)");
  sub->add_option("--div", o->div, "divergence mode: fd | hutchinson");
  sub->add_option("--k", o->k, "hutchinson probes per point");
  sub->add_option("--fd-h", o->fd_h, "central-difference step");
  sub->add_option("--hutch-h", o->hutch_h, "hutchinson JVP step");
  sub->add_option("--pe", o->pe, "Fourier octaves");
  sub->add_option("--hidden", o->hidden, "hidden widths")->delimiter(',');
  sub->add_option("--seed", o->seed, "rng seed");
  sub->add_option("--out", o->out, "output model path (required)");
  sub->callback([o, sub]() {
    apply_config(sub, o->config);
    run_train_flow(*o);
  });
}

// ------------------------------------------------------------------ recover

struct RecoverOpts {
  std::string config;
  std::string score;
  std::string preset;
  double eta = 0.1;
  double alpha = 0.9;
  double dt = 1.0;
  int steps = 100;
  std::string gamma = "both";
  int grid = 64;
  int burn_in = 4000;
  std::uint64_t seed = 0;
  std::string out;
};

void run_recover(const RecoverOpts& o) {
  require(!o.score.empty(), "recover: --score is required");
  require(!o.preset.empty(), "recover: --preset is required");
  require(!o.out.empty(), "recover: --out is required");
  LoadedDenoiser ld = load_denoiser(o.score);
  require(ld.kind == 1, "recover: expects a grid score model");
  GrayScottParams truth = gray_scott_preset(o.preset);
  NoiseSchedule sched;
  Grid init = generate_turing_dataset(truth, 1, o.grid, o.grid, o.burn_in,
                                      derive_seed(o.seed, "recover_init"),
                                      o.dt)
                  .front();
  RecoverConfig rc;
  rc.eta = o.eta;
  rc.alpha = o.alpha;
  rc.dt = o.dt;
  rc.steps = o.steps;
  rc.seed = derive_seed(o.seed, "recover_sde");
  rc.gammas = parse_gammas(o.gamma);
  RecoverResult r = recover_turing_dynamics(ld.grid, sched, init, truth, rc);

  write_rollout(o.out, r.rollout);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < r.candidates.size(); ++i)
    rows.push_back({r.candidates[i].gamma, r.candidates[i].similarity,
                    static_cast<double>(static_cast<int>(i) == r.selected)});
  write_csv(o.out + ".candidates.csv", "gamma,similarity,selected", rows);
  Config m{{"score", o.score},
           {"preset", o.preset},
           {"eta", show(o.eta)},
           {"alpha", show(o.alpha)},
           {"dt", show(o.dt)},
           {"steps", std::to_string(o.steps)},
           {"gamma", o.gamma},
           {"grid", std::to_string(o.grid)},
           {"burn_in", std::to_string(o.burn_in)},
           {"seed", std::to_string(o.seed)},
           {"selected_gamma", show(r.candidates[r.selected].gamma)}};
  write_manifest(o.out, "recover", m, {o.score});
  for (std::size_t i = 0; i < r.candidates.size(); ++i)
    std::cout << "recover: gamma " << r.candidates[i].gamma
              << " change similarity " << r.candidates[i].similarity
              << (static_cast<int>(i) == r.selected ? "  <- selected" : "")
              << "\n";
  std::cout << "recover: rollout (" << r.rollout.size() << " frames) at "
            << o.out << "\n";
}

void setup_recover(CLI::App& app) {
  auto o = std::make_shared<RecoverOpts>();
  CLI::App* sub = app.add_subcommand(
      "recover", "Training-free dynamics from a grid score model: roll the "
                 "stabilized SDE per candidate orientation and keep the one "
                 "matching the simulator's change fingerprint");
  sub->add_option("--config", o->config, "key=value defaults; flags win");
  sub->add_option("--score", o->score, "grid score model path (required)");
  sub->add_option("--preset", o->preset,
                  "life | wave | spirals | maze (required)");
  sub->add_option("--eta", o->eta, "stabilization coefficient");
  sub->add_option("--alpha", o->alpha, "score working noise level");
  sub->add_option("--dt", o->dt, "SDE step");
  sub->add_option("--steps", o->steps, "rollout length");
  sub->add_option("--gamma", o->gamma, "'both' or comma-separated values");
  sub->add_option("--grid", o->grid, "lattice side of the initial state");
  sub->add_option("--burn-in", o->burn_in, "simulator steps before t=0");
  sub->add_option("--seed", o->seed, "rng seed");
  sub->add_option("--out", o->out, "output rollout path (required)");
  sub->callback([o, sub]() {
    apply_config(sub, o->config);
    run_recover(*o);
  });
}

// ------------------------------------------------------------------ rollout

struct RolloutOpts {
  std::string config;
  std::string preset;
  int steps = -1;
  std::string score;  // empty: plain simulator rollout
  double gamma = 1.0;
  double eta = 0.1;
  double alpha = 0.9;
  double dt = 1.0;
  int grid = 64;
  int burn_in = 4000;
  std::uint64_t seed = 0;
  std::string out;
};

void run_rollout(const RolloutOpts& o) {
  require(!o.preset.empty(), "rollout: --preset is required");
  require(o.steps >= 0, "rollout: --steps is required");
  require(!o.out.empty(), "rollout: --out is required");
  GrayScottParams truth = gray_scott_preset(o.preset);
  Grid init = generate_turing_dataset(truth, 1, o.grid, o.grid, o.burn_in,
                                      derive_seed(o.seed, "rollout_init"),
                                      o.dt)
                  .front();
  std::vector<Grid> frames;
  Config m{{"preset", o.preset},   {"steps", std::to_string(o.steps)},
           {"dt", show(o.dt)},     {"grid", std::to_string(o.grid)},
           {"burn_in", std::to_string(o.burn_in)},
           {"seed", std::to_string(o.seed)}};
  std::vector<std::string> inputs;
  if (o.score.empty()) {
    frames.reserve(o.steps + 1);
    frames.push_back(init);
    for (int t = 0; t < o.steps; ++t)
      frames.push_back(gray_scott_step(frames.back(), truth, o.dt));
  } else {
    LoadedDenoiser ld = load_denoiser(o.score);
    require(ld.kind == 1, "rollout: expects a grid score model");
    NoiseSchedule sched;
    GridScoreFn score = [&ld, &sched, &o](const Grid& g) {
      return grid_score(ld.grid, sched, g, o.alpha);
    };
    LangevinConfig lc;
    lc.eta = o.eta;
    lc.dt = o.dt;
    lc.steps = o.steps;
    lc.seed = derive_seed(o.seed, "rollout_sde");
    frames = langevin_rollout(
        init, kernel_drift(make_rotation_kernel(o.gamma).kernel()), score, lc);
    m["score"] = o.score;
    m["gamma"] = show(o.gamma);
    m["eta"] = show(o.eta);
    m["alpha"] = show(o.alpha);
    inputs.push_back(o.score);
  }
  write_rollout(o.out, frames);
  write_manifest(o.out, "rollout", m, inputs);
  std::cout << "rollout: " << frames.size() << " frames at " << o.out << "\n";
}

void setup_rollout(CLI::App& app) {
  auto o = std::make_shared<RolloutOpts>();
  CLI::App* sub = app.add_subcommand(
      "rollout", "Roll a preset forward: the plain simulator, or the "
                 "stabilized SDE when a score model is given");
  sub->add_option("--config", o->config, "key=value defaults; flags win");
  sub->add_option("--preset", o->preset,
                  "life | wave | spirals | maze (required)");
  sub->add_option("--steps", o->steps, "rollout length (required)");
  sub->add_option("--score", o->score, "grid score model (enables the SDE)");
  sub->add_option("--gamma", o->gamma, "rotation kernel coefficient");
  sub->add_option("--eta", o->eta, "stabilization coefficient");
  sub->add_option("--alpha", o->alpha, "score working noise level");
  sub->add_option("--dt", o->dt, "step size");
  sub->add_option("--grid", o->grid, "lattice side");
  sub->add_option("--burn-in", o->burn_in, "simulator steps before t=0");
  sub->add_option("--seed", o->seed, "rng seed");
  sub->add_option("--out", o->out, "output rollout path (required)");
  sub->callback([o, sub]() {
    apply_config(sub, o->config);
    run_rollout(*o);
  });
}

// --------------------------------------------------------------------- eval

struct EvalOpts {
  std::string config;
  std::string mode = "curve";
  // curve
  std::string flow;
  std::string data;
  int steps = -1;    // -1 = mode default (curve 100, turing-summary 50)
  double dt = -1.0;  // -1 = mode default (0.1 / 1.0 / Lyapunov 0.01)
  int every = 10;
  double sigma = 0.5;
  // lorenz summary
  int seeds = 5;
  int n = -1;  // samples (lorenz) or dataset size (turing); -1 = default
  int denoiser_epochs = 700;
  int flow_epochs = 500;
  std::vector<int> hidden = {64, 64};
  double alpha = -1.0;  // -1 = mode default
  int probes = 1024;
  int lyap_steps = 50000;
  // turing summary
  std::string preset = "life";
  int grid = 64;
  int burn_in = 4000;
  int epochs = 50;
  int n_random = 8;
  double eta = 0.1;
  int jobs = 1;
  std::uint64_t seed = 0;
  std::string out;
};

void run_eval_curve(const EvalOpts& o) {
  require(!o.flow.empty() && !o.data.empty(),
          "eval --mode curve: needs --flow and --data");
  Dataset ds = read_dataset(o.data);
  require(!ds.is_grid(), "eval --mode curve: expects a vector dataset");
  VelocityNetwork net = load_velocity_net(o.flow);
  int steps = o.steps < 0 ? 100 : o.steps;
  double dt = o.dt < 0 ? 0.1 : o.dt;
  auto curve = preservation_curve(net, ds.vectors, steps, dt, o.every,
                                  o.sigma);
  std::vector<std::vector<double>> rows;
  for (auto [t, mmd] : curve) rows.push_back({t, mmd});
  write_csv(o.out, "t,mmd", rows);
  Config m{{"mode", "curve"},        {"flow", o.flow},
           {"data", o.data},         {"steps", std::to_string(steps)},
           {"dt", show(dt)},         {"every", std::to_string(o.every)},
           {"sigma", show(o.sigma)}};
  write_manifest(o.out, "eval", m, {o.flow, o.data});
  for (auto [t, mmd] : curve)
    std::cout << "eval: t " << t << " mmd " << mmd << "\n";
}

void run_eval_lorenz(const EvalOpts& o) {
  LorenzStudyConfig c;
  c.n_seeds = o.seeds;
  c.n_samples = o.n < 0 ? c.n_samples : o.n;
  c.denoiser_epochs = o.denoiser_epochs;
  c.flow_epochs = o.flow_epochs;
  c.hidden = o.hidden;
  c.alpha = o.alpha < 0 ? 0.95 : o.alpha;
  c.n_probes = o.probes;
  c.lyap_steps = o.lyap_steps;
  c.lyap_dt = o.dt < 0 ? c.lyap_dt : o.dt;
  c.seed = o.seed;
  LorenzStudyResult r = lorenz_study(c);
  write_metric_csv(o.out,
                   {{"lambda_truth", {r.lambda_truth}},
                    {"lambda_learned", r.lambda_learned},
                    {"sim_learned_truth", r.sim_learned_truth},
                    {"sim_random_truth", r.sim_random_truth},
                    {"mean_pair_learned", {r.mean_pair_learned}},
                    {"mean_pair_random", {r.mean_pair_random}}});
  Config m{{"mode", "lorenz-summary"},
           {"seeds", std::to_string(c.n_seeds)},
           {"n", std::to_string(c.n_samples)},
           {"denoiser_epochs", std::to_string(c.denoiser_epochs)},
           {"flow_epochs", std::to_string(c.flow_epochs)},
           {"hidden", show(c.hidden)},
           {"alpha", show(c.alpha)},
           {"probes", std::to_string(c.n_probes)},
           {"lyap_steps", std::to_string(c.lyap_steps)},
           {"lyap_dt", show(c.lyap_dt)},
           {"seed", std::to_string(o.seed)}};
  write_manifest(o.out, "eval", m);
  std::cout << "eval: lambda truth " << r.lambda_truth << "\n";
  for (std::size_t i = 0; i < r.lambda_learned.size(); ++i)
    std::cout << "eval: seed " << i << " lambda " << r.lambda_learned[i]
              << " sim(learned,truth) " << r.sim_learned_truth[i]
              << " sim(random,truth) " << r.sim_random_truth[i] << "\n";
  std::cout << "eval: pairwise learned " << r.mean_pair_learned
            << " pairwise random " << r.mean_pair_random << "\n";
}

void run_eval_turing(const EvalOpts& o) {
  TuringStudyConfig c;
  c.preset = o.preset;
  c.n_samples = o.n < 0 ? c.n_samples : o.n;
  c.hw = o.grid;
  c.burn_in = o.burn_in;
  c.train.epochs = o.epochs;
  c.train.seed = o.seed;
  c.steps = o.steps < 0 ? c.steps : o.steps;
  c.n_random = o.n_random;
  c.eta = o.eta;
  c.alpha = o.alpha < 0 ? 0.9 : o.alpha;
  c.dt = o.dt < 0 ? c.dt : o.dt;
  c.seed = o.seed;
  c.jobs = o.jobs;
  TuringStudyResult r = turing_recovery_study(c);
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  for (std::size_t i = 0; i < r.recover.candidates.size(); ++i)
    rows.push_back({"candidate_" + std::to_string(i),
                    {r.recover.candidates[i].gamma,
                     r.recover.candidates[i].similarity,
                     static_cast<double>(static_cast<int>(i) ==
                                         r.recover.selected)}});
  rows.push_back({"random_kernel_mean_std", {r.random_mean, r.random_std}});
  rows.push_back({"reweight_similarity", {r.sim_reweight}});
  rows.push_back(
      {"change_rel_learned_truth", {r.change_rel_learned, r.change_rel_truth}});
  write_metric_csv(o.out, rows);
  Config m{{"mode", "turing-summary"},
           {"preset", c.preset},
           {"n", std::to_string(c.n_samples)},
           {"grid", std::to_string(c.hw)},
           {"burn_in", std::to_string(c.burn_in)},
           {"epochs", std::to_string(c.train.epochs)},
           {"steps", std::to_string(c.steps)},
           {"n_random", std::to_string(c.n_random)},
           {"eta", show(c.eta)},
           {"alpha", show(c.alpha)},
           {"dt", show(c.dt)},
           {"seed", std::to_string(o.seed)},
           {"jobs", std::to_string(o.jobs)}};
  write_manifest(o.out, "eval", m);
  for (const auto& cand : r.recover.candidates)
    std::cout << "eval: gamma " << cand.gamma << " similarity "
              << cand.similarity << "\n";
  std::cout << "eval: selected gamma "
            << r.recover.candidates[r.recover.selected].gamma << "\n"
            << "eval: random kernels " << r.random_mean << " +- "
            << r.random_std << ", reweight " << r.sim_reweight << "\n"
            << "eval: relative change learned " << r.change_rel_learned
            << " truth " << r.change_rel_truth << "\n";
}

void setup_eval(CLI::App& app) {
  auto o = std::make_shared<EvalOpts>();
  CLI::App* sub = app.add_subcommand(
      "eval", "Evaluation helpers: preservation curve of a trained flow, or "
              "the full Lorenz / Turing study summaries");
  sub->add_option("--config", o->config, "key=value defaults; flags win");
  sub->add_option("--mode", o->mode, "curve | lorenz-summary | turing-summary");
  sub->add_option("--flow", o->flow, "velocity model (curve)");
  sub->add_option("--data", o->data, "vector dataset (curve)");
  sub->add_option("--steps", o->steps, "integration / rollout steps");
  sub->add_option("--dt", o->dt, "step size");
  sub->add_option("--every", o->every, "curve checkpoint stride");
  sub->add_option("--sigma", o->sigma, "MMD kernel bandwidth");
  sub->add_option("--seeds", o->seeds, "training seeds (lorenz-summary)");
  sub->add_option("--n", o->n, "dataset size (study modes)");
  sub->add_option("--denoiser-epochs", o->denoiser_epochs,
                  "score epochs (lorenz-summary)");
  sub->add_option("--flow-epochs", o->flow_epochs,
                  "flow epochs (lorenz-summary)");
  sub->add_option("--hidden", o->hidden, "hidden widths (lorenz-summary)")
      ->delimiter(',');
  sub->add_option("--alpha", o->alpha, "working noise level");
  sub->add_option("--probes", o->probes, "fingerprint probes");
  sub->add_option("--lyap-steps", o->lyap_steps, "Lyapunov horizon");
  sub->add_option("--preset", o->preset, "simulator preset (turing-summary)");
  sub->add_option("--grid", o->grid, "lattice side (turing-summary)");
  sub->add_option("--burn-in", o->burn_in, "burn-in steps (turing-summary)");
  sub->add_option("--epochs", o->epochs, "score epochs (turing-summary)");
  sub->add_option("--n-random", o->n_random,
                  "random-kernel baselines (turing-summary)");
  sub->add_option("--eta", o->eta, "stabilization coefficient");
  sub->add_option("--jobs", o->jobs, "dataset worker threads");
  sub->add_option("--seed", o->seed, "rng seed");
  sub->add_option("--out", o->out, "output CSV path (required)");
  sub->callback([o, sub]() {
    apply_config(sub, o->config);
    require(!o->out.empty(), "eval: --out is required");
    if (o->mode == "curve") {
      run_eval_curve(*o);
    } else if (o->mode == "lorenz-summary") {
      run_eval_lorenz(*o);
    } else if (o->mode == "turing-summary") {
      run_eval_turing(*o);
    } else {
      throw InputError("eval: unknown mode '" + o->mode +
                       "' (curve | lorenz-summary | turing-summary)");
    }
  });
}

// -------------------------------------------------------------------- alife

struct AlifeOpts {
  std::string config;
  std::string pattern;
  int n = 64;
  int grid = 128;
  int attempts = 2;
  int max_patterns = 16;
  int epochs = 50;
  int batch = 16;
  double lr = 1e-3;
  std::vector<int> widths = {16, 32, 64};
  double alpha = 0.9;
  double eta = 0.1;
  double dt = 1.0;
  double gy = 1.0;
  double gx = 0.0;
  int steps = 50;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
};

void run_alife(const AlifeOpts& o) {
  require(!o.pattern.empty(), "alife: --pattern is required");
  require(!o.out.empty(), "alife: --out is required");
  RgbaImage pattern = load_rgba_png(o.pattern);
  Config m{{"pattern", o.pattern},
           {"n", std::to_string(o.n)},
           {"grid", std::to_string(o.grid)},
           {"attempts", std::to_string(o.attempts)},
           {"max_patterns", std::to_string(o.max_patterns)},
           {"epochs", std::to_string(o.epochs)},
           {"batch", std::to_string(o.batch)},
           {"lr", show(o.lr)},
           {"widths", show(o.widths)},
           {"alpha", show(o.alpha)},
           {"eta", show(o.eta)},
           {"dt", show(o.dt)},
           {"gy", show(o.gy)},
           {"gx", show(o.gx)},
           {"steps", std::to_string(o.steps)},
           {"seed", std::to_string(o.seed)},
           {"jobs", std::to_string(o.jobs)}};

  std::vector<Grid> scenes =
      generate_alife_dataset(pattern, o.n, o.grid, o.grid,
                             derive_seed(o.seed, "alife_data"), o.attempts,
                             o.max_patterns, o.jobs);
  std::string scenes_path = o.out + ".scenes.eqfd";
  write_dataset(scenes_path, scenes);
  write_manifest(scenes_path, "alife", m, {o.pattern});
  std::cout << "alife: " << o.n << " scenes at " << scenes_path << "\n";

  NoiseSchedule sched;
  GridTrainConfig tc;
  tc.epochs = o.epochs;
  tc.batch = o.batch;
  tc.lr = o.lr;
  tc.widths = o.widths;
  tc.seed = derive_seed(o.seed, "alife_score");
  TrainLog log;
  GridDenoiser model = train_grid_denoiser(scenes, sched, Objective::Eps, tc,
                                           &log);
  std::string score_path = o.out + ".score.eqfs";
  save_denoiser(score_path, model);
  write_loss_csv(score_path + ".loss.csv", log);
  write_manifest(score_path, "alife", m, {scenes_path});
  std::cout << "alife: score model (final loss " << log.final_loss << ") at "
            << score_path << "\n";

  Rng demo_rng(derive_seed(o.seed, "alife_demo"));
  AlifeScene demo =
      make_alife_scene(pattern, o.grid, o.grid, demo_rng, o.attempts,
                       o.max_patterns);
  GridScoreFn score = [&model, &sched, &o](const Grid& g) {
    return grid_score(model, sched, g, o.alpha);
  };
  LangevinConfig lc;
  lc.eta = o.eta;
  lc.dt = o.dt;
  lc.steps = o.steps;
  lc.seed = derive_seed(o.seed, "alife_sde");
  std::vector<Grid> frames = langevin_rollout(
      demo.occupancy,
      kernel_drift(make_translation_kernel(o.gy, o.gx).kernel()), score, lc);
  std::string rollout_path = o.out + ".rollout.eqfr";
  write_rollout(rollout_path, frames);
  write_manifest(rollout_path, "alife", m, {score_path});
  std::cout << "alife: rollout (" << frames.size() << " frames, "
            << demo.placements.size() << " sprites) at " << rollout_path
            << "\n";

  std::vector<CentroidTrack> tracks = centroid_tracks(demo, pattern, frames);
  std::vector<std::vector<double>> rows;
  for (const auto& tr : tracks)
    for (std::size_t f = 0; f < tr.points.size(); ++f)
      rows.push_back({static_cast<double>(tr.pattern),
                      static_cast<double>(f), tr.points[f].first,
                      tr.points[f].second});
  std::string tracks_path = o.out + ".tracks.csv";
  write_csv(tracks_path, "pattern,frame,y,x", rows);
  write_manifest(tracks_path, "alife", m, {rollout_path});
  std::cout << "alife: centroid tracks at " << tracks_path << "\n";
}

void setup_alife(CLI::App& app) {
  auto o = std::make_shared<AlifeOpts>();
  CLI::App* sub = app.add_subcommand(
      "alife", "Sprite-placement pipeline: scenes from a PNG pattern, a "
               "grid score model, a translation-kernel SDE rollout, and "
               "per-sprite centroid tracks");
  sub->add_option("--config", o->config, "key=value defaults; flags win");
  sub->add_option("--pattern", o->pattern, "RGBA sprite PNG (required)");
  sub->add_option("--n", o->n, "number of scenes");
  sub->add_option("--grid", o->grid, "canvas side");
  sub->add_option("--attempts", o->attempts, "placement proposals per sprite");
  sub->add_option("--max-patterns", o->max_patterns, "sprites per scene cap");
  sub->add_option("--epochs", o->epochs, "score training epochs");
  sub->add_option("--batch", o->batch, "score training batch");
  sub->add_option("--lr", o->lr, "Adam learning rate");
  sub->add_option("--widths", o->widths, "grid encoder widths")
      ->delimiter(',');
  sub->add_option("--alpha", o->alpha, "score working noise level");
  sub->add_option("--eta", o->eta, "stabilization coefficient");
  sub->add_option("--dt", o->dt, "SDE step");
  sub->add_option("--gy", o->gy, "translation kernel, vertical component");
  sub->add_option("--gx", o->gx, "translation kernel, horizontal component");
  sub->add_option("--steps", o->steps, "rollout length");
  sub->add_option("--seed", o->seed, "rng seed");
  sub->add_option("--jobs", o->jobs, "scene generation worker threads");
  sub->add_option("--out", o->out, "output path prefix (required)");
  sub->callback([o, sub]() {
    apply_config(sub, o->config);
    run_alife(*o);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium-flow toolkit: pattern-preserving dynamics from "
               "static samples"};
  app.require_subcommand(1);
  setup_gen_data(app);
  setup_train_score(app);
  setup_train_flow(app);
  setup_recover(app);
  setup_rollout(app);
  setup_eval(app);
  setup_alife(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const eqflow::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const eqflow::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
