#include "stent/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "stent/rng.hpp"

namespace stent {

namespace {

constexpr double kProbEps = 1e-12;

void uniform_fill(Mat& m, rng::Stream& s, int fan_in) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& v : m.a) v = s.uniform(-scale, scale);
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Inputs aggregated per node by the weighted self-loop average.
std::vector<Vec> aggregate_inputs(const StentGraph& g,
                                  const std::vector<std::vector<std::pair<int, double>>>& adj) {
  std::vector<Vec> agg(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const Vec& self = g.nodes[i].feature.values;
    Vec sum = self;  // self-loop weight fixed at 1
    double dhat = 1.0;
    for (const auto& [j, w] : adj[i]) {
      dhat += w;
      add_scaled(sum, g.nodes[static_cast<std::size_t>(j)].feature.values, w);
    }
    const double inv = 1.0 / dhat;
    for (double& v : sum) v *= inv;
    agg[i] = std::move(sum);
  }
  return agg;
}

struct ForwardCache {
  std::vector<Vec> agg;       // weighted input averages
  std::vector<Vec> x1_pre;    // before ReLU
  std::vector<Vec> x1;
  std::vector<Vec> e1_pre;    // per directed edge
  std::vector<Vec> x2;
  std::vector<Vec> e2_pre;
  std::vector<Vec> x3;
  std::vector<Vec> fc_pre;
  std::vector<Vec> xfc;
  Vec z;                      // head logits
  NodeProbabilities probs;
  std::vector<std::pair<int, int>> directed;  // (receiver i, neighbor j)
};

void check_dims(const StentGraph& g, const GcnParams& p) {
  const GcnDims& d = p.dims;
  if (p.wgcl_w.rows != d.h1 || p.wgcl_w.cols != d.input || p.ecl1_w.rows != d.h2 ||
      p.ecl1_w.cols != 2 * d.h1 || p.ecl2_w.rows != d.h3 || p.ecl2_w.cols != 2 * d.h2 ||
      p.fc_w.rows != d.h1 || p.fc_w.cols != d.input ||
      static_cast<int>(p.head_w.size()) != d.head_input())
    throw std::invalid_argument("gcn: parameter shapes disagree with dims");
  for (const GraphNode& n : g.nodes)
    if (static_cast<int>(n.feature.values.size()) != d.input)
      throw std::invalid_argument("gcn: node feature dimension mismatch");
}

void forward_pass(const StentGraph& g, const GcnParams& p, ForwardCache& c) {
  check_dims(g, p);
  const std::size_t n = g.nodes.size();
  const auto adj = adjacency(g);
  const auto nbrs = neighbor_lists(g);

  c.agg = aggregate_inputs(g, adj);
  c.x1_pre.resize(n);
  c.x1.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.x1_pre[i] = affine(p.wgcl_w, c.agg[i], p.wgcl_b);
    c.x1[i] = c.x1_pre[i];
    for (double& v : c.x1[i]) v = std::max(0.0, v);
  }

  // Directed edge list drives both edge convolutions.
  c.directed.clear();
  for (std::size_t i = 0; i < n; ++i)
    for (const int j : nbrs[i]) c.directed.emplace_back(static_cast<int>(i), j);

  auto run_ecl = [&](const std::vector<Vec>& x, const Mat& w, const Vec& b, int out_dim,
                     std::vector<Vec>& e_pre, std::vector<Vec>& out) {
    e_pre.resize(c.directed.size());
    out.assign(n, Vec(static_cast<std::size_t>(out_dim), 0.0));
    Vec cat(static_cast<std::size_t>(w.cols));
    for (std::size_t k = 0; k < c.directed.size(); ++k) {
      const auto [i, j] = c.directed[k];
      const Vec& xi = x[static_cast<std::size_t>(i)];
      const Vec& xj = x[static_cast<std::size_t>(j)];
      std::copy(xi.begin(), xi.end(), cat.begin());
      std::copy(xj.begin(), xj.end(), cat.begin() + static_cast<std::ptrdiff_t>(xi.size()));
      e_pre[k] = affine(w, cat, b);
      Vec& acc = out[static_cast<std::size_t>(i)];
      for (int r = 0; r < out_dim; ++r)
        acc[static_cast<std::size_t>(r)] += std::max(0.0, e_pre[k][static_cast<std::size_t>(r)]);
    }
  };
  run_ecl(c.x1, p.ecl1_w, p.ecl1_b, p.dims.h2, c.e1_pre, c.x2);
  run_ecl(c.x2, p.ecl2_w, p.ecl2_b, p.dims.h3, c.e2_pre, c.x3);

  c.fc_pre.resize(n);
  c.xfc.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.fc_pre[i] = affine(p.fc_w, g.nodes[i].feature.values, p.fc_b);
    c.xfc[i] = c.fc_pre[i];
    for (double& v : c.xfc[i]) v = std::max(0.0, v);
  }

  c.z.assign(n, 0.0);
  c.probs.assign(n, 0.0);
  const int h3 = p.dims.h3, h1 = p.dims.h1;
  for (std::size_t i = 0; i < n; ++i) {
    double z = p.head_b;
    for (int r = 0; r < h3; ++r) z += p.head_w[static_cast<std::size_t>(r)] * c.x3[i][static_cast<std::size_t>(r)];
    for (int r = 0; r < h1; ++r)
      z += p.head_w[static_cast<std::size_t>(h3 + r)] * c.xfc[i][static_cast<std::size_t>(r)];
    c.z[i] = z;
    c.probs[i] = sigmoid(z);
  }
}

void zero_like(const GcnParams& p, GcnGrads& g) {
  g.wgcl_w = Mat(p.wgcl_w.rows, p.wgcl_w.cols);
  g.wgcl_b.assign(p.wgcl_b.size(), 0.0);
  g.ecl1_w = Mat(p.ecl1_w.rows, p.ecl1_w.cols);
  g.ecl1_b.assign(p.ecl1_b.size(), 0.0);
  g.ecl2_w = Mat(p.ecl2_w.rows, p.ecl2_w.cols);
  g.ecl2_b.assign(p.ecl2_b.size(), 0.0);
  g.fc_w = Mat(p.fc_w.rows, p.fc_w.cols);
  g.fc_b.assign(p.fc_b.size(), 0.0);
  g.head_w.assign(p.head_w.size(), 0.0);
  g.head_b = 0.0;
}

}  // namespace

GcnParams init_gcn_params(const GcnDims& dims, std::uint64_t seed) {
  if (dims.input < 1 || dims.h1 < 1 || dims.h2 < 1 || dims.h3 < 1)
    throw std::invalid_argument("init_gcn_params: dimensions must be positive");
  GcnParams p;
  p.dims = dims;
  p.wgcl_w = Mat(dims.h1, dims.input);
  p.wgcl_b.assign(static_cast<std::size_t>(dims.h1), 0.0);
  p.ecl1_w = Mat(dims.h2, 2 * dims.h1);
  p.ecl1_b.assign(static_cast<std::size_t>(dims.h2), 0.0);
  p.ecl2_w = Mat(dims.h3, 2 * dims.h2);
  p.ecl2_b.assign(static_cast<std::size_t>(dims.h3), 0.0);
  p.fc_w = Mat(dims.h1, dims.input);
  p.fc_b.assign(static_cast<std::size_t>(dims.h1), 0.0);
  p.head_w.assign(static_cast<std::size_t>(dims.head_input()), 0.0);

  rng::Stream s(seed, /*tag=*/0x6C4u);
  uniform_fill(p.wgcl_w, s, dims.input);
  uniform_fill(p.ecl1_w, s, 2 * dims.h1);
  uniform_fill(p.ecl2_w, s, 2 * dims.h2);
  uniform_fill(p.fc_w, s, dims.input);
  const double hs = 1.0 / std::sqrt(static_cast<double>(dims.head_input()));
  for (double& v : p.head_w) v = s.uniform(-hs, hs);
  // Small positive biases keep units off the exact ReLU corner, where the
  // subgradient and a finite difference would disagree.
  for (Vec* b : {&p.wgcl_b, &p.ecl1_b, &p.ecl2_b, &p.fc_b}) {
    for (double& v : *b) v = s.uniform(0.01, 0.05);
  }
  return p;
}

std::vector<Vec> wgcl_forward(const StentGraph& g, const Mat& theta, const Vec& bias) {
  for (const GraphNode& n : g.nodes)
    if (static_cast<int>(n.feature.values.size()) != theta.cols)
      throw std::invalid_argument("wgcl_forward: feature dimension mismatch");
  const auto adj = adjacency(g);
  const auto agg = aggregate_inputs(g, adj);
  std::vector<Vec> out(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    out[i] = affine(theta, agg[i], bias);
    for (double& v : out[i]) v = std::max(0.0, v);
  }
  return out;
}

std::vector<Vec> ecl_forward(const std::vector<std::vector<int>>& neighbors,
                             const std::vector<Vec>& features, const Mat& w, const Vec& b) {
  if (neighbors.size() != features.size())
    throw std::invalid_argument("ecl_forward: neighbors and features must align");
  for (const Vec& f : features)
    if (static_cast<int>(2 * f.size()) != w.cols)
      throw std::invalid_argument("ecl_forward: feature dimension mismatch");
  std::vector<Vec> out(features.size(), Vec(static_cast<std::size_t>(w.rows), 0.0));
  Vec cat(static_cast<std::size_t>(w.cols));
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (const int j : neighbors[i]) {
      const Vec& xi = features[i];
      const Vec& xj = features[static_cast<std::size_t>(j)];
      std::copy(xi.begin(), xi.end(), cat.begin());
      std::copy(xj.begin(), xj.end(), cat.begin() + static_cast<std::ptrdiff_t>(xi.size()));
      const Vec e = affine(w, cat, b);
      for (int r = 0; r < w.rows; ++r)
        out[i][static_cast<std::size_t>(r)] += std::max(0.0, e[static_cast<std::size_t>(r)]);
    }
  }
  return out;
}

NodeProbabilities gcn_forward(const StentGraph& g, const GcnParams& params) {
  ForwardCache c;
  forward_pass(g, params, c);
  return c.probs;
}

double node_ce_loss(const NodeProbabilities& probs, const std::vector<int>& labels,
                    std::array<double, 2> class_weights) {
  if (probs.size() != labels.size())
    throw std::invalid_argument("node_ce_loss: probs and labels must align");
  if (probs.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], kProbEps, 1.0 - kProbEps);
    total += labels[i] ? -class_weights[1] * std::log(p) : -class_weights[0] * std::log(1.0 - p);
  }
  return total / static_cast<double>(probs.size());
}

double gcn_loss_and_grads(const StentGraph& g, const GcnParams& p, const std::vector<int>& labels,
                          std::array<double, 2> class_weights, GcnGrads* grads,
                          NodeProbabilities* probs_out) {
  if (labels.size() != g.nodes.size())
    throw std::invalid_argument("gcn_loss_and_grads: labels must align with nodes");
  ForwardCache c;
  forward_pass(g, p, c);
  if (probs_out) *probs_out = c.probs;
  const double loss = node_ce_loss(c.probs, labels, class_weights);
  if (!grads) return loss;

  zero_like(p, *grads);
  const std::size_t n = g.nodes.size();
  if (n == 0) return loss;
  const double inv_n = 1.0 / static_cast<double>(n);
  const int h3 = p.dims.h3, h1 = p.dims.h1;

  // d loss / d z_i; the sigmoid and log cancel into (p - y) times the weight.
  Vec dz(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = class_weights[static_cast<std::size_t>(labels[i])];
    dz[i] = w * (c.probs[i] - static_cast<double>(labels[i])) * inv_n;
  }

  std::vector<Vec> dx3(n, Vec(static_cast<std::size_t>(h3), 0.0));
  std::vector<Vec> dxfc(n, Vec(static_cast<std::size_t>(h1), 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    grads->head_b += dz[i];
    for (int r = 0; r < h3; ++r) {
      grads->head_w[static_cast<std::size_t>(r)] += dz[i] * c.x3[i][static_cast<std::size_t>(r)];
      dx3[i][static_cast<std::size_t>(r)] = dz[i] * p.head_w[static_cast<std::size_t>(r)];
    }
    for (int r = 0; r < h1; ++r) {
      grads->head_w[static_cast<std::size_t>(h3 + r)] += dz[i] * c.xfc[i][static_cast<std::size_t>(r)];
      dxfc[i][static_cast<std::size_t>(r)] = dz[i] * p.head_w[static_cast<std::size_t>(h3 + r)];
    }
  }

  // FC bypass
  for (std::size_t i = 0; i < n; ++i) {
    Vec d = dxfc[i];
    for (int r = 0; r < h1; ++r)
      if (c.fc_pre[i][static_cast<std::size_t>(r)] <= 0.0) d[static_cast<std::size_t>(r)] = 0.0;
    add_outer(grads->fc_w, d, g.nodes[i].feature.values);
    for (int r = 0; r < h1; ++r) grads->fc_b[static_cast<std::size_t>(r)] += d[static_cast<std::size_t>(r)];
  }

  // Edge convolutions, walked backwards over the directed edge list.
  auto backprop_ecl = [&](const std::vector<Vec>& x_in, const std::vector<Vec>& e_pre,
                          const Mat& w, Mat& dw, Vec& db, const std::vector<Vec>& dout,
                          std::vector<Vec>& dx_in) {
    const int out_dim = w.rows;
    const int in_dim = static_cast<int>(x_in[0].size());
    Vec cat(static_cast<std::size_t>(w.cols));
    Vec de(static_cast<std::size_t>(out_dim));
    for (std::size_t k = 0; k < c.directed.size(); ++k) {
      const auto [i, j] = c.directed[k];
      bool live = false;
      for (int r = 0; r < out_dim; ++r) {
        de[static_cast<std::size_t>(r)] = e_pre[k][static_cast<std::size_t>(r)] > 0.0
                                              ? dout[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)]
                                              : 0.0;
        live = live || de[static_cast<std::size_t>(r)] != 0.0;
      }
      if (!live) continue;
      const Vec& xi = x_in[static_cast<std::size_t>(i)];
      const Vec& xj = x_in[static_cast<std::size_t>(j)];
      std::copy(xi.begin(), xi.end(), cat.begin());
      std::copy(xj.begin(), xj.end(), cat.begin() + static_cast<std::ptrdiff_t>(xi.size()));
      add_outer(dw, de, cat);
      for (int r = 0; r < out_dim; ++r) db[static_cast<std::size_t>(r)] += de[static_cast<std::size_t>(r)];
      for (int r = 0; r < out_dim; ++r) {
        const double dr = de[static_cast<std::size_t>(r)];
        if (dr == 0.0) continue;
        const double* row = &w.a[static_cast<std::size_t>(r) * w.cols];
        Vec& dxi = dx_in[static_cast<std::size_t>(i)];
        Vec& dxj = dx_in[static_cast<std::size_t>(j)];
        for (int q = 0; q < in_dim; ++q) {
          dxi[static_cast<std::size_t>(q)] += dr * row[q];
          dxj[static_cast<std::size_t>(q)] += dr * row[in_dim + q];
        }
      }
    }
  };

  std::vector<Vec> dx2(n, Vec(static_cast<std::size_t>(p.dims.h2), 0.0));
  backprop_ecl(c.x2, c.e2_pre, p.ecl2_w, grads->ecl2_w, grads->ecl2_b, dx3, dx2);
  std::vector<Vec> dx1(n, Vec(static_cast<std::size_t>(h1), 0.0));
  backprop_ecl(c.x1, c.e1_pre, p.ecl1_w, grads->ecl1_w, grads->ecl1_b, dx2, dx1);

  // Weighted graph convolution
  for (std::size_t i = 0; i < n; ++i) {
    Vec d = dx1[i];
    for (int r = 0; r < h1; ++r)
      if (c.x1_pre[i][static_cast<std::size_t>(r)] <= 0.0) d[static_cast<std::size_t>(r)] = 0.0;
    add_outer(grads->wgcl_w, d, c.agg[i]);
    for (int r = 0; r < h1; ++r) grads->wgcl_b[static_cast<std::size_t>(r)] += d[static_cast<std::size_t>(r)];
  }
  return loss;
}

namespace {

struct ParamView {
  std::vector<double*> coords;
};

ParamView view_params(GcnParams& p) {
  ParamView v;
  auto push_mat = [&](Mat& m) {
    for (double& x : m.a) v.coords.push_back(&x);
  };
  auto push_vec = [&](Vec& b) {
    for (double& x : b) v.coords.push_back(&x);
  };
  push_mat(p.wgcl_w);
  push_vec(p.wgcl_b);
  push_mat(p.ecl1_w);
  push_vec(p.ecl1_b);
  push_mat(p.ecl2_w);
  push_vec(p.ecl2_b);
  push_mat(p.fc_w);
  push_vec(p.fc_b);
  push_vec(p.head_w);
  v.coords.push_back(&p.head_b);
  return v;
}

std::vector<double> flatten_grads(const GcnGrads& g) {
  std::vector<double> out;
  auto push_mat = [&](const Mat& m) { out.insert(out.end(), m.a.begin(), m.a.end()); };
  auto push_vec = [&](const Vec& b) { out.insert(out.end(), b.begin(), b.end()); };
  push_mat(g.wgcl_w);
  push_vec(g.wgcl_b);
  push_mat(g.ecl1_w);
  push_vec(g.ecl1_b);
  push_mat(g.ecl2_w);
  push_vec(g.ecl2_b);
  push_mat(g.fc_w);
  push_vec(g.fc_b);
  push_vec(g.head_w);
  out.push_back(g.head_b);
  return out;
}

void apply_step(GcnParams& p, const GcnGrads& g, double lr) {
  auto step_mat = [&](Mat& m, const Mat& d) {
    for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] -= lr * d.a[i];
  };
  auto step_vec = [&](Vec& b, const Vec& d) {
    for (std::size_t i = 0; i < b.size(); ++i) b[i] -= lr * d[i];
  };
  step_mat(p.wgcl_w, g.wgcl_w);
  step_vec(p.wgcl_b, g.wgcl_b);
  step_mat(p.ecl1_w, g.ecl1_w);
  step_vec(p.ecl1_b, g.ecl1_b);
  step_mat(p.ecl2_w, g.ecl2_w);
  step_vec(p.ecl2_b, g.ecl2_b);
  step_mat(p.fc_w, g.fc_w);
  step_vec(p.fc_b, g.fc_b);
  step_vec(p.head_w, g.head_w);
  p.head_b -= lr * g.head_b;
}

void accumulate(GcnGrads& acc, const GcnGrads& g, double scale) {
  auto acc_mat = [&](Mat& m, const Mat& d) {
    for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] += scale * d.a[i];
  };
  auto acc_vec = [&](Vec& b, const Vec& d) {
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += scale * d[i];
  };
  acc_mat(acc.wgcl_w, g.wgcl_w);
  acc_vec(acc.wgcl_b, g.wgcl_b);
  acc_mat(acc.ecl1_w, g.ecl1_w);
  acc_vec(acc.ecl1_b, g.ecl1_b);
  acc_mat(acc.ecl2_w, g.ecl2_w);
  acc_vec(acc.ecl2_b, g.ecl2_b);
  acc_mat(acc.fc_w, g.fc_w);
  acc_vec(acc.fc_b, g.fc_b);
  acc_vec(acc.head_w, g.head_w);
  acc.head_b += scale * g.head_b;
}

}  // namespace

GcnTrainResult train_gcn(const std::vector<TrainClip>& clips, const GcnTrainConfig& cfg) {
  if (clips.empty()) throw std::invalid_argument("train_gcn: no clips");
  bool has0 = false, has1 = false;
  for (const TrainClip& clip : clips) {
    if (clip.labels.size() != clip.graph.nodes.size())
      throw std::invalid_argument("train_gcn: labels misaligned with graph nodes");
    for (int y : clip.labels) (y ? has1 : has0) = true;
  }
  if (!has0 || !has1) throw std::invalid_argument("train_gcn: both classes required");

  GcnParams p = init_gcn_params(cfg.dims, cfg.seed);
  GcnTrainResult result;

  std::vector<std::size_t> order(clips.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch =
      cfg.batch_clips > 0 ? std::min<std::size_t>(clips.size(), static_cast<std::size_t>(cfg.batch_clips))
                          : clips.size();

  auto full_loss = [&]() {
    double total = 0.0;
    for (const TrainClip& clip : clips) {
      if (clip.graph.nodes.empty()) continue;
      total += cfg.beta *
               gcn_loss_and_grads(clip.graph, p, clip.labels, cfg.class_weights, nullptr);
    }
    return total / static_cast<double>(clips.size());
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < clips.size()) {
      rng::Stream s(cfg.seed, /*tag=*/0x5F1u, static_cast<std::uint64_t>(epoch));
      s.shuffle(order);
    }
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      GcnGrads total;
      zero_like(p, total);
      const double scale = cfg.beta / static_cast<double>(end - start);
      for (std::size_t k = start; k < end; ++k) {
        const TrainClip& clip = clips[order[k]];
        if (clip.graph.nodes.empty()) continue;
        GcnGrads g;
        gcn_loss_and_grads(clip.graph, p, clip.labels, cfg.class_weights, &g);
        accumulate(total, g, scale);
      }
      apply_step(p, total, cfg.learning_rate);
    }
    result.loss_trace.push_back(full_loss());
  }
  result.params = std::move(p);
  return result;
}

double grad_check(const GcnParams& params, const StentGraph& g, const std::vector<int>& labels,
                  std::array<double, 2> class_weights, double step, int max_coords,
                  std::uint64_t seed) {
  if (step <= 0.0) throw std::invalid_argument("grad_check: step must be > 0");
  GcnParams work = params;
  ParamView view = view_params(work);

  GcnGrads grads;
  gcn_loss_and_grads(g, work, labels, class_weights, &grads);
  const std::vector<double> analytic = flatten_grads(grads);

  std::vector<std::size_t> coords(view.coords.size());
  std::iota(coords.begin(), coords.end(), 0);
  if (max_coords > 0 && coords.size() > static_cast<std::size_t>(max_coords)) {
    rng::Stream s(seed, /*tag=*/0xFDu);
    s.shuffle(coords);
    coords.resize(static_cast<std::size_t>(max_coords));
  }

  double worst = 0.0;
  for (const std::size_t k : coords) {
    double* coord = view.coords[k];
    const double saved = *coord;
    const double h = step * std::max(1.0, std::abs(saved));
    *coord = saved + h;
    const double up = gcn_loss_and_grads(g, work, labels, class_weights, nullptr);
    *coord = saved - h;
    const double dn = gcn_loss_and_grads(g, work, labels, class_weights, nullptr);
    *coord = saved;
    const double numeric = (up - dn) / (2.0 * h);
    const double err = std::abs(analytic[k] - numeric) / std::max(1.0, std::abs(analytic[k]));
    worst = std::max(worst, err);
  }
  return worst;
}

double total_loss(const TotalLossInputs& in, double lambda1, double lambda2, double alpha,
                  double beta, std::array<double, 2> object_class_weights,
                  std::array<double, 2> node_class_weights) {
  if (in.pred_heatmaps.size() != in.gt_heatmaps.size())
    throw std::invalid_argument("total_loss: heatmap lists must align");
  double hm = 0.0;
  for (std::size_t i = 0; i < in.pred_heatmaps.size(); ++i)
    hm += heatmap_loss(in.pred_heatmaps[i], in.gt_heatmaps[i], lambda1, lambda2);
  if (!in.pred_heatmaps.empty()) hm /= static_cast<double>(in.pred_heatmaps.size());
  const double obj = object_ce_loss(in.object_logits, in.object_labels, object_class_weights);
  const double node = node_ce_loss(in.node_probs, in.node_labels, node_class_weights);
  return hm + alpha * obj + beta * node;
}

namespace {

void write_block(std::ostream& os, const std::vector<double>& values) {
  os.precision(17);
  for (std::size_t i = 0; i < values.size(); ++i) os << values[i] << (i + 1 == values.size() ? "\n" : " ");
  if (values.empty()) os << "\n";
}

}  // namespace

std::string format_gcn_params(const GcnParams& p) {
  std::ostringstream os;
  os << "gcn v1\n";
  os << p.dims.input << " " << p.dims.h1 << " " << p.dims.h2 << " " << p.dims.h3 << "\n";
  write_block(os, p.wgcl_w.a);
  write_block(os, p.wgcl_b);
  write_block(os, p.ecl1_w.a);
  write_block(os, p.ecl1_b);
  write_block(os, p.ecl2_w.a);
  write_block(os, p.ecl2_b);
  write_block(os, p.fc_w.a);
  write_block(os, p.fc_b);
  write_block(os, p.head_w);
  os.precision(17);
  os << p.head_b << "\n";
  return os.str();
}

GcnParams parse_gcn_params(const std::string& text) {
  std::istringstream is(text);
  std::string word, version;
  is >> word >> version;
  if (word != "gcn" || version != "v1")
    throw std::invalid_argument("parse_gcn_params: expected 'gcn v1' header");
  GcnDims dims;
  if (!(is >> dims.input >> dims.h1 >> dims.h2 >> dims.h3))
    throw std::invalid_argument("parse_gcn_params: bad dimension line");
  GcnParams p = init_gcn_params(dims, 0);
  auto read_all = [&](std::vector<double>& dst, const char* name) {
    for (double& v : dst)
      if (!(is >> v)) throw std::invalid_argument(std::string("parse_gcn_params: truncated ") + name);
  };
  read_all(p.wgcl_w.a, "wgcl_w");
  read_all(p.wgcl_b, "wgcl_b");
  read_all(p.ecl1_w.a, "ecl1_w");
  read_all(p.ecl1_b, "ecl1_b");
  read_all(p.ecl2_w.a, "ecl2_w");
  read_all(p.ecl2_b, "ecl2_b");
  read_all(p.fc_w.a, "fc_w");
  read_all(p.fc_b, "fc_b");
  read_all(p.head_w, "head_w");
  if (!(is >> p.head_b)) throw std::invalid_argument("parse_gcn_params: truncated head_b");
  return p;
}

}  // namespace stent
