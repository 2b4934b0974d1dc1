#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "stent/detect.hpp"
#include "stent/graph.hpp"
#include "stent/linalg.hpp"

namespace stent {

struct GcnDims {
  int input = 72;  // descriptor dimension
  int h1 = 32;     // weighted graph convolution output
  int h2 = 16;     // first edge convolution output
  int h3 = 8;      // second edge convolution output

  int head_input() const { return h3 + h1; }
};

// All learnable tensors of the tracking head: the weighted graph convolution,
// two edge convolutions over concatenated endpoint features, the per-node FC
// bypass, and the scalar output head over [gcn branch, bypass].
struct GcnParams {
  GcnDims dims;
  Mat wgcl_w;  // h1 x input
  Vec wgcl_b;
  Mat ecl1_w;  // h2 x 2*h1
  Vec ecl1_b;
  Mat ecl2_w;  // h3 x 2*h2
  Vec ecl2_b;
  Mat fc_w;  // h1 x input
  Vec fc_b;
  Vec head_w;  // h3 + h1
  double head_b = 0.0;
};

GcnParams init_gcn_params(const GcnDims& dims, std::uint64_t seed);

using NodeProbabilities = std::vector<double>;

// Weighted neighborhood averaging with a unit self-loop followed by ReLU:
// x_i = relu(theta * sum_{j in N(i) u {i}} (w_ji / dhat_i) x0_j + bias),
// dhat_i = 1 + sum of incident edge weights.
std::vector<Vec> wgcl_forward(const StentGraph& g, const Mat& theta, const Vec& bias);

// Edge convolution: e_ij = relu(W [x_i, x_j] + b) for both directions of
// every edge, then x_i = sum over neighbors of e_ij. Isolated nodes map to
// the zero vector.
std::vector<Vec> ecl_forward(const std::vector<std::vector<int>>& neighbors,
                             const std::vector<Vec>& features, const Mat& w, const Vec& b);

NodeProbabilities gcn_forward(const StentGraph& g, const GcnParams& params);

// Class-weighted binary cross entropy over node probabilities, mean over
// nodes; weight chosen by the true class (negative, positive).
double node_ce_loss(const NodeProbabilities& probs, const std::vector<int>& labels,
                    std::array<double, 2> class_weights);

struct GcnGrads {
  Mat wgcl_w;
  Vec wgcl_b;
  Mat ecl1_w;
  Vec ecl1_b;
  Mat ecl2_w;
  Vec ecl2_b;
  Mat fc_w;
  Vec fc_b;
  Vec head_w;
  double head_b = 0.0;
};

// Loss plus analytic gradients of the class-weighted node loss, derived by
// reverse accumulation through the full stack.
double gcn_loss_and_grads(const StentGraph& g, const GcnParams& params,
                          const std::vector<int>& labels, std::array<double, 2> class_weights,
                          GcnGrads* grads, NodeProbabilities* probs_out = nullptr);

struct TrainClip {
  StentGraph graph;
  std::vector<int> labels;  // aligned with graph nodes
};

struct GcnTrainConfig {
  GcnDims dims;
  int epochs = 400;
  double learning_rate = 1e-3;  // plain fixed-step gradient descent
  std::array<double, 2> class_weights = {1.0, 5.0};
  double beta = 2.0;  // node-loss weight in the total objective
  int batch_clips = 0;  // 0 = full batch
  std::uint64_t seed = 1;
};

struct GcnTrainResult {
  GcnParams params;
  std::vector<double> loss_trace;  // full-set objective after each epoch
};

// Deterministic gradient descent on beta * node loss averaged over clips.
// Throws when the clips are empty or carry a single class overall.
GcnTrainResult train_gcn(const std::vector<TrainClip>& clips, const GcnTrainConfig& cfg);

// Central-difference verification of the analytic gradient. Checks every
// coordinate, or a seeded subsample of at least min(max_coords, total) when
// max_coords > 0. Steps are scaled per coordinate; the reported value is the
// max over coordinates of |analytic - numeric| / max(1, |analytic|).
double grad_check(const GcnParams& params, const StentGraph& g, const std::vector<int>& labels,
                  std::array<double, 2> class_weights, double step, int max_coords = 0,
                  std::uint64_t seed = 1);

// Total training objective: mean heatmap loss over frame pairs plus
// alpha * object cross entropy plus beta * node cross entropy.
struct TotalLossInputs {
  std::vector<Heatmap> pred_heatmaps;
  std::vector<Heatmap> gt_heatmaps;
  std::vector<std::array<double, 2>> object_logits;
  std::vector<int> object_labels;
  NodeProbabilities node_probs;
  std::vector<int> node_labels;
};

double total_loss(const TotalLossInputs& in, double lambda1, double lambda2, double alpha,
                  double beta, std::array<double, 2> object_class_weights,
                  std::array<double, 2> node_class_weights);

// Parameter save/load; versioned plain-text format.
std::string format_gcn_params(const GcnParams& params);
GcnParams parse_gcn_params(const std::string& text);

}  // namespace stent
