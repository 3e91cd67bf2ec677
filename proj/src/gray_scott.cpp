#include "eqflow/gray_scott.hpp"

#include "eqflow/parallel.hpp"

namespace eqflow {

void laplacian_periodic(const double* f, int h, int w, double* out) {
  for (int y = 0; y < h; ++y) {
    int up = (y == 0 ? h - 1 : y - 1) * w;
    int dn = (y == h - 1 ? 0 : y + 1) * w;
    int row = y * w;
    for (int x = 0; x < w; ++x) {
      int lf = x == 0 ? w - 1 : x - 1;
      int rt = x == w - 1 ? 0 : x + 1;
      out[row + x] = f[up + x] + f[dn + x] + f[row + lf] + f[row + rt] -
                     4.0 * f[row + x];
    }
  }
}

GrayScottParams gray_scott_preset(const std::string& name) {
  GrayScottParams p;
  if (name == "life") {
    p.F = 0.006;
    p.kill = 0.045;
  } else if (name == "wave") {
    p.F = 0.018;
    p.kill = 0.049;
  } else if (name == "spirals") {
    p.F = 0.007;
    p.kill = 0.028;
  } else if (name == "maze") {
    p.F = 0.029;
    p.kill = 0.057;
  } else {
    throw InputError("unknown gray-scott preset: " + name);
  }
  return p;
}

const std::vector<std::string>& gray_scott_preset_names() {
  static const std::vector<std::string> names = {"life", "wave", "spirals",
                                                 "maze"};
  return names;
}

void gray_scott_step_inplace(Grid& state, const GrayScottParams& p,
                             double dt) {
  require(state.c == 2, "gray_scott_step: state must have channels (u, v)");
  require(dt > 0.0, "gray_scott_step: dt must be positive");
  const int hw = state.h * state.w;
  static thread_local std::vector<double> lap_u, lap_v;
  lap_u.resize(hw);
  lap_v.resize(hw);
  double* u = state.data.data();
  double* v = state.data.data() + hw;
  laplacian_periodic(u, state.h, state.w, lap_u.data());
  laplacian_periodic(v, state.h, state.w, lap_v.data());
  for (int i = 0; i < hw; ++i) {
    double uv2 = u[i] * v[i] * v[i];
    double du = p.Du * lap_u[i] - uv2 + p.F * (1.0 - u[i]);
    double dv = p.Dv * lap_v[i] + uv2 - (p.F + p.kill) * v[i];
    u[i] += dt * du;
    v[i] += dt * dv;
  }
  if (!state.data.allFinite())
    throw NumericalError("gray_scott_step: state became non-finite");
}

Grid gray_scott_step(const Grid& state, const GrayScottParams& p, double dt) {
  Grid out = state;
  gray_scott_step_inplace(out, p, dt);
  return out;
}

Grid gray_scott_init(int h, int w, Rng& rng) {
  Grid g(2, h, w);
  g.channel(0).setOnes();
  int n_splotches = 5 + rng.uniform_int(16);  // 5..20
  for (int s = 0; s < n_splotches; ++s) {
    int y0 = rng.uniform_int(h);
    int x0 = rng.uniform_int(w);
    for (int dy = 0; dy < 6; ++dy)
      for (int dx = 0; dx < 6; ++dx)
        g.at(1, (y0 + dy) % h, (x0 + dx) % w) = 0.5;
  }
  return g;
}

std::vector<Grid> generate_turing_dataset(const GrayScottParams& p, int n,
                                          int h, int w, int burn_in,
                                          std::uint64_t seed, double dt,
                                          int jobs) {
  require(n >= 1, "generate_turing_dataset: n must be >= 1");
  require(burn_in >= 1, "generate_turing_dataset: burn_in must be >= 1");
  std::vector<Grid> out(n);
  parallel_for(n, jobs, [&](int run) {
    Rng rng(derive_seed(seed, "turing_run", run));
    Grid g = gray_scott_init(h, w, rng);
    for (int t = 0; t < burn_in; ++t) gray_scott_step_inplace(g, p, dt);
    out[run] = std::move(g);
  });
  return out;
}

}  // namespace eqflow
