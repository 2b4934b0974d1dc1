#include "stent/propose.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stent/rng.hpp"

namespace stent {

std::vector<StentCandidate> propose_candidates(const std::vector<LandmarkDetection>& dets,
                                               const ProposalConfig& cfg) {
  std::vector<StentCandidate> out;
  if (dets.size() < 2) return out;
  for (std::size_t i = 1; i < dets.size(); ++i)
    if (dets[i].frame != dets[0].frame)
      throw std::invalid_argument("propose_candidates: detections span multiple frames");
  for (std::size_t i = 0; i < dets.size(); ++i) {
    for (std::size_t j = i + 1; j < dets.size(); ++j) {
      const double d = distance(dets[i].position, dets[j].position);
      if (d < cfg.min_pair_distance || d > cfg.max_pair_distance) continue;
      StentCandidate c = make_candidate(dets[i], dets[j]);
      if (c.score < cfg.score_floor) continue;
      out.push_back(std::move(c));
    }
  }
  return out;
}

namespace {

struct Stats {
  double mean = 0.0, stddev = 0.0, min = 0.0, max = 0.0;
};

Stats compute_stats(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  s.min = s.max = v[0];
  double sum = 0.0;
  for (double x : v) {
    sum += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean = sum / static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(v.size()));
  return s;
}

}  // namespace

FeatureVector patch_descriptor(const GrayFrame& frame, const StentCandidate& cand,
                               const ProposalConfig& cfg) {
  const Point2 a = cand.first.position;
  const Point2 b = cand.second.position;
  const Point2 axis = b - a;
  const double len = norm(axis);
  const int nl = cfg.grid_length_bins, nw = cfg.grid_width_bins;

  FeatureVector fv;
  fv.values.assign(static_cast<std::size_t>(cfg.descriptor_dim()), 0.0);

  // Degenerate pair: no axis to orient the patch along.
  if (len < 1e-9) return fv;

  const Point2 u = (1.0 / len) * axis;
  const Point2 n = {-u.y, u.x};
  const double band_width = std::max(0.25 * len, kMinBoxSide);

  // The grid covers the between-marker interior; the marker disks at the
  // ends would otherwise dominate the z-scale and drown the band texture
  // (they are summarized separately below). Each cell averages a 2x2
  // sub-grid over its own extent so the mesh texture does not alias
  // against the cell stride.
  const double end_margin = std::min(8.0, 0.25 * len);
  const double span = len - 2.0 * end_margin;
  const double cell_len = span / nl;
  const double cell_wid = band_width / nw;
  std::vector<double> grid(static_cast<std::size_t>(nl) * nw);
  for (int i = 0; i < nl; ++i) {
    const double s = end_margin + span * (i + 0.5) / nl;
    for (int j = 0; j < nw; ++j) {
      const double t = band_width * ((j + 0.5) / nw - 0.5);
      double acc = 0.0;
      for (const double ds : {-0.25 * cell_len, 0.25 * cell_len}) {
        for (const double dt : {-0.25 * cell_wid, 0.25 * cell_wid}) {
          const Point2 p = a + (s + ds) * u + (t + dt) * n;
          acc += bilinear_sample(frame, p.x, p.y);
        }
      }
      grid[static_cast<std::size_t>(i) * nw + j] = acc / (4.0 * 255.0);
    }
  }

  // Marker neighborhoods: 5x5 samples centered on each landmark.
  std::vector<double> nbhd;
  nbhd.reserve(50);
  for (const Point2& c : {a, b})
    for (int dy = -2; dy <= 2; ++dy)
      for (int dx = -2; dx <= 2; ++dx)
        nbhd.push_back(bilinear_sample(frame, c.x + dx, c.y + dy) / 255.0);

  const Stats band = compute_stats(grid);
  const Stats marks = compute_stats(nbhd);

  // z-normalized grid; a constant patch maps to zeros.
  for (std::size_t i = 0; i < grid.size(); ++i)
    fv.values[i] = band.stddev > 1e-9 ? (grid[i] - band.mean) / band.stddev : 0.0;

  const std::size_t base = grid.size();
  fv.values[base + 0] = band.mean;
  fv.values[base + 1] = band.stddev;
  fv.values[base + 2] = band.min;
  fv.values[base + 3] = band.max;
  fv.values[base + 4] = marks.mean;
  fv.values[base + 5] = marks.stddev;
  fv.values[base + 6] = marks.min;
  fv.values[base + 7] = marks.max;

  double norm2 = 0.0;
  for (double v : fv.values) norm2 += v * v;
  if (norm2 > 1e-24) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : fv.values) v *= inv;
  }
  return fv;
}

MlpParams init_mlp_params(int input_dim, int hidden_dim, std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1)
    throw std::invalid_argument("init_mlp_params: dimensions must be positive");
  MlpParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.w1 = Mat(hidden_dim, input_dim);
  p.b1.assign(static_cast<std::size_t>(hidden_dim), 0.0);
  p.w2 = Mat(2, hidden_dim);
  p.b2.assign(2, 0.0);
  rng::Stream s(seed, /*tag=*/0xA1u);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (double& v : p.w1.a) v = s.uniform(-s1, s1);
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  for (double& v : p.w2.a) v = s.uniform(-s2, s2);
  return p;
}

std::array<double, 2> object_logits(const FeatureVector& x, const MlpParams& params) {
  if (static_cast<int>(x.values.size()) != params.input_dim)
    throw std::invalid_argument("object_logits: feature dimension mismatch");
  Vec h = affine(params.w1, x.values, params.b1);
  for (double& v : h) v = std::max(0.0, v);
  const Vec z = affine(params.w2, h, params.b2);
  return {z[0], z[1]};
}

double classify_object(const FeatureVector& x, const MlpParams& params) {
  const auto z = object_logits(x, params);
  // softmax positive-class probability, stabilized
  const double m = std::max(z[0], z[1]);
  const double e0 = std::exp(z[0] - m), e1 = std::exp(z[1] - m);
  return e1 / (e0 + e1);
}

double object_ce_loss(const std::vector<std::array<double, 2>>& logits,
                      const std::vector<int>& labels, std::array<double, 2> class_weights) {
  if (logits.size() != labels.size())
    throw std::invalid_argument("object_ce_loss: logits and labels must align");
  if (logits.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double m = std::max(logits[i][0], logits[i][1]);
    const double e0 = std::exp(logits[i][0] - m), e1 = std::exp(logits[i][1] - m);
    const double logz = m + std::log(e0 + e1);
    const int y = labels[i];
    total += class_weights[static_cast<std::size_t>(y)] * (logz - logits[i][static_cast<std::size_t>(y)]);
  }
  return total / static_cast<double>(logits.size());
}

double mlp_loss_and_grads(const MlpParams& params, const LabeledFeatures& data,
                          const std::vector<std::size_t>& batch, MlpGrads* grads) {
  if (grads) {
    grads->w1 = Mat(params.hidden_dim, params.input_dim);
    grads->b1.assign(static_cast<std::size_t>(params.hidden_dim), 0.0);
    grads->w2 = Mat(2, params.hidden_dim);
    grads->b2.assign(2, 0.0);
  }
  if (batch.empty()) return 0.0;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const std::size_t idx : batch) {
    const Vec& x = data.features[idx].values;
    const int y = data.labels[idx];
    const double w = params.class_weights[static_cast<std::size_t>(y)];

    Vec hpre = affine(params.w1, x, params.b1);
    Vec h = hpre;
    for (double& v : h) v = std::max(0.0, v);
    Vec z = affine(params.w2, h, params.b2);

    const double m = std::max(z[0], z[1]);
    const double e0 = std::exp(z[0] - m), e1 = std::exp(z[1] - m);
    const double logz = m + std::log(e0 + e1);
    loss += w * (logz - z[static_cast<std::size_t>(y)]) * inv_n;

    if (!grads) continue;
    Vec dz = {e0 / (e0 + e1), e1 / (e0 + e1)};
    dz[static_cast<std::size_t>(y)] -= 1.0;
    dz[0] *= w * inv_n;
    dz[1] *= w * inv_n;

    add_outer(grads->w2, dz, h);
    grads->b2[0] += dz[0];
    grads->b2[1] += dz[1];

    Vec dh(static_cast<std::size_t>(params.hidden_dim), 0.0);
    add_matvec_transposed(params.w2, dz, dh);
    for (int k = 0; k < params.hidden_dim; ++k)
      if (hpre[static_cast<std::size_t>(k)] <= 0.0) dh[static_cast<std::size_t>(k)] = 0.0;

    add_outer(grads->w1, dh, x);
    for (int k = 0; k < params.hidden_dim; ++k) grads->b1[static_cast<std::size_t>(k)] += dh[static_cast<std::size_t>(k)];
  }
  return loss;
}

MlpTrainResult train_object_classifier(const LabeledFeatures& data, const MlpTrainConfig& cfg) {
  if (data.features.empty() || data.features.size() != data.labels.size())
    throw std::invalid_argument("train_object_classifier: empty or misaligned dataset");
  bool has0 = false, has1 = false;
  for (int y : data.labels) (y ? has1 : has0) = true;
  if (!has0 || !has1)
    throw std::invalid_argument("train_object_classifier: both classes required");

  const int input_dim = static_cast<int>(data.features[0].values.size());
  MlpParams p = init_mlp_params(input_dim, cfg.hidden_dim, cfg.seed);
  p.class_weights = cfg.class_weights;

  std::vector<std::size_t> order(data.features.size());
  std::iota(order.begin(), order.end(), 0);

  MlpTrainResult result;
  const int batch_size = std::max(1, cfg.batch_size);
  std::vector<std::size_t> all = order;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng::Stream shuffle_stream(cfg.seed, /*tag=*/0xE9u, static_cast<std::uint64_t>(epoch));
    shuffle_stream.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(batch_size));
      std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                     order.begin() + static_cast<std::ptrdiff_t>(end));
      MlpGrads g;
      mlp_loss_and_grads(p, data, batch, &g);
      for (std::size_t i = 0; i < p.w1.a.size(); ++i) p.w1.a[i] -= cfg.learning_rate * g.w1.a[i];
      for (std::size_t i = 0; i < p.b1.size(); ++i) p.b1[i] -= cfg.learning_rate * g.b1[i];
      for (std::size_t i = 0; i < p.w2.a.size(); ++i) p.w2.a[i] -= cfg.learning_rate * g.w2.a[i];
      for (std::size_t i = 0; i < p.b2.size(); ++i) p.b2[i] -= cfg.learning_rate * g.b2[i];
    }
    result.loss_trace.push_back(mlp_loss_and_grads(p, data, all, nullptr));
  }
  result.params = std::move(p);
  return result;
}

}  // namespace stent
