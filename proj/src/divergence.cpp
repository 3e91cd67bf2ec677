#include "eqflow/divergence.hpp"

namespace eqflow {

double divergence_exact(const VelocityField& f, const Vec& x) {
  const int d = f.dim();
  double tr = 0.0;
  Vec e = Vec::Zero(d);
  for (int a = 0; a < d; ++a) {
    e[a] = 1.0;
    tr += f.jvp(x, e)[a];
    e[a] = 0.0;
  }
  return tr;
}

double divergence_fd(const VelocityField& f, const Vec& x, double h) {
  require(h > 0.0, "divergence_fd: h must be positive");
  const int d = f.dim();
  double tr = 0.0;
  Vec xp = x, xm = x;
  for (int a = 0; a < d; ++a) {
    xp[a] = x[a] + h;
    xm[a] = x[a] - h;
    tr += (f.eval(xp)[a] - f.eval(xm)[a]) / (2.0 * h);
    xp[a] = x[a];
    xm[a] = x[a];
  }
  return tr;
}

double divergence_hutchinson(const VelocityField& f, const Vec& x,
                             const Mat& Z, double h) {
  require(Z.cols() >= 1, "divergence_hutchinson: need at least one probe");
  require(Z.rows() == f.dim(), "divergence_hutchinson: probe dim mismatch");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    Vec z = Z.col(j);
    acc += z.dot(f.eval(x + h * z) - f.eval(x - h * z)) / (2.0 * h);
  }
  return acc / static_cast<double>(Z.cols());
}

double divergence_hutchinson(const VelocityField& f, const Vec& x, int k,
                             Rng& rng, double h) {
  require(k >= 1, "divergence_hutchinson: k must be >= 1");
  return divergence_hutchinson(f, x, rng.normal_mat(f.dim(), k), h);
}

DivergenceEstimate estimate_divergence(const VelocityField& f, const Vec& x,
                                       DivMode mode, int k, Rng* rng) {
  DivergenceEstimate est;
  est.mode = mode;
  switch (mode) {
    case DivMode::Exact:
      est.value = divergence_exact(f, x);
      break;
    case DivMode::Fd:
      est.value = divergence_fd(f, x);
      break;
    case DivMode::Hutchinson: {
      require(rng != nullptr, "estimate_divergence: hutchinson needs an rng");
      est.value = divergence_hutchinson(f, x, k, *rng);
      est.probes = k;
      break;
    }
  }
  return est;
}

DivMode parse_div_mode(const std::string& name) {
  if (name == "exact") return DivMode::Exact;
  if (name == "fd") return DivMode::Fd;
  if (name == "hutchinson") return DivMode::Hutchinson;
  throw InputError("unknown divergence mode: " + name);
}

std::string div_mode_name(DivMode m) {
  switch (m) {
    case DivMode::Exact: return "exact";
    case DivMode::Fd: return "fd";
    case DivMode::Hutchinson: return "hutchinson";
  }
  return "?";
}

}  // namespace eqflow
