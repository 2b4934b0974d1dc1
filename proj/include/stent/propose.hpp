#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "stent/core.hpp"
#include "stent/linalg.hpp"

namespace stent {

struct ProposalConfig {
  double min_pair_distance = 12.0;  // px
  double max_pair_distance = 200.0;
  int grid_length_bins = 16;  // samples along the pair axis
  int grid_width_bins = 4;    // samples across it
  double score_floor = 0.0;   // optional gate on the candidate score

  // grid cells plus 8 summary statistics
  int descriptor_dim() const { return grid_length_bins * grid_width_bins + 8; }
};

struct FeatureVector {
  Vec values;
};

// Every unordered detection pair whose separation falls inside the distance
// gate becomes a candidate; score is the mean of the landmark scores.
// All detections must share one frame.
std::vector<StentCandidate> propose_candidates(const std::vector<LandmarkDetection>& dets,
                                               const ProposalConfig& cfg);

// Deterministic appearance descriptor of the band between the markers: an
// oriented grid of bilinear samples (z-normalized) plus summary statistics
// of the band and the two marker neighborhoods, L2-normalized.
FeatureVector patch_descriptor(const GrayFrame& frame, const StentCandidate& cand,
                               const ProposalConfig& cfg);

// Two-layer classifier over descriptors: affine, ReLU, affine, softmax.
struct MlpParams {
  int input_dim = 0;
  int hidden_dim = 0;
  Mat w1;  // hidden x input
  Vec b1;
  Mat w2;  // 2 x hidden
  Vec b2;
  std::array<double, 2> class_weights = {1.0, 5.0};  // negative, positive
};

MlpParams init_mlp_params(int input_dim, int hidden_dim, std::uint64_t seed);

std::array<double, 2> object_logits(const FeatureVector& x, const MlpParams& params);
// Positive-class probability.
double classify_object(const FeatureVector& x, const MlpParams& params);

// Weighted cross entropy, mean over samples; weight picked by the true class.
double object_ce_loss(const std::vector<std::array<double, 2>>& logits,
                      const std::vector<int>& labels, std::array<double, 2> class_weights);

struct LabeledFeatures {
  std::vector<FeatureVector> features;
  std::vector<int> labels;  // 0 negative, 1 positive
};

struct MlpGrads {
  Mat w1;
  Vec b1;
  Mat w2;
  Vec b2;
};

// Weighted-CE loss and analytic gradients over a batch (mean-normalized).
double mlp_loss_and_grads(const MlpParams& params, const LabeledFeatures& data,
                          const std::vector<std::size_t>& batch, MlpGrads* grads);

struct MlpTrainConfig {
  int hidden_dim = 32;
  int epochs = 200;
  int batch_size = 32;
  double learning_rate = 0.05;
  std::array<double, 2> class_weights = {1.0, 5.0};
  std::uint64_t seed = 1;
};

struct MlpTrainResult {
  MlpParams params;
  std::vector<double> loss_trace;  // full-set loss after each epoch
};

// Mini-batch gradient descent on the weighted cross entropy; deterministic
// given the seed. Throws when the dataset holds a single class.
MlpTrainResult train_object_classifier(const LabeledFeatures& data, const MlpTrainConfig& cfg);

}  // namespace stent
