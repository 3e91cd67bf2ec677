#include "eqflow/velocity_net.hpp"

namespace eqflow {

VelocityNetwork::VelocityNetwork(const VelocityNetConfig& cfg)
    : d_(cfg.dim), pe_(cfg.pe_octaves) {
  require(d_ >= 1, "VelocityNetwork: dim must be >= 1");
  std::vector<int> widths;
  widths.push_back(encoded_dim(d_, pe_));
  for (int h : cfg.hidden) widths.push_back(h);
  widths.push_back(d_);
  net_ = Mlp(widths, cfg.seed);
  run_mean_ = Vec::Zero(d_);
  run_var_ = Vec::Ones(d_);
}

Mat VelocityNetwork::raw_forward(const Mat& X, Mlp::Cache* cache) const {
  require(X.rows() == d_, "VelocityNetwork: state dim mismatch");
  return net_.forward(encode_with_input(X, pe_), cache);
}

Vec VelocityNetwork::eval(const Vec& x) const {
  return eval_batch(x).col(0);
}

Mat VelocityNetwork::eval_batch(const Mat& X) const {
  Mat raw = raw_forward(X);
  Vec inv_std = (run_var_.array() + kEps).rsqrt().matrix();
  return inv_std.asDiagonal() * (raw.colwise() - run_mean_);
}

Vec VelocityNetwork::jvp(const Vec& x, const Vec& t) const {
  Mat T = encode_with_input_jvp(x, t, pe_);
  Mat JT;
  net_.forward_jvp(encode_with_input(x, pe_).col(0), T, nullptr, &JT);
  Vec inv_std = (run_var_.array() + kEps).rsqrt().matrix();
  return inv_std.asDiagonal() * JT.col(0);
}

VelocityNetwork::BatchStats VelocityNetwork::batch_stats(const Mat& raw) {
  require(raw.cols() >= 2, "batch_stats: need at least two samples");
  BatchStats st;
  st.mean = raw.rowwise().mean();
  Mat centered = raw.colwise() - st.mean;
  st.var = centered.array().square().rowwise().mean();
  st.inv_std = (st.var.array() + kEps).rsqrt().matrix();
  return st;
}

Mat VelocityNetwork::forward_train(const Mat& X) const {
  Mat raw = raw_forward(X);
  BatchStats st = batch_stats(raw);
  return st.inv_std.asDiagonal() * (raw.colwise() - st.mean);
}

void VelocityNetwork::update_running(const BatchStats& st) {
  run_mean_ = (1.0 - kMomentum) * run_mean_ + kMomentum * st.mean;
  run_var_ = (1.0 - kMomentum) * run_var_ + kMomentum * st.var;
}

}  // namespace eqflow
