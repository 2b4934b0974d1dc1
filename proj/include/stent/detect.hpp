#pragma once

#include <vector>

#include "stent/core.hpp"

namespace stent {

struct Heatmap {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major, each in [0, 1]

  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }
  double& at(int x, int y) {
    return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }
};

struct DetectorParams {
  int tophat_radius = 5;       // disk structuring element radius, px
  double threshold = 0.45;     // on the per-frame normalized response
  double nms_radius = 4.0;     // px
  double heatmap_sigma = 2.0;  // px, for rendered reference heatmaps
  int max_detections = 12;
};

// Dark top-hat response: grayscale closing with a disk minus the image,
// normalized to [0, 1] per frame. A constant frame maps to all zeros.
Heatmap tophat_response(const GrayFrame& frame, const DetectorParams& params);

// Peaks of the top-hat response as landmark detections; score is the
// normalized response, positions refined to subpixel. At most
// params.max_detections returned, highest scores kept.
std::vector<LandmarkDetection> tophat_detect(const GrayFrame& frame, const DetectorParams& params,
                                             int frame_index = 0);

// value(p) = max over points of exp(-|p-c|^2 / (2 sigma^2)); composition by
// max keeps each peak at exactly 1 even when points overlap.
Heatmap render_heatmap(const std::vector<Point2>& points, double sigma, int width, int height);

// Local maxima above threshold, greedy NMS by value, then subpixel
// refinement by a separable quadratic fit over the 3x3 neighborhood.
std::vector<LandmarkDetection> extract_peaks(const Heatmap& hm, double threshold,
                                             double nms_radius, int frame_index = 0);

// Mean squared error plus an extra penalty on under-prediction:
// (l1/N) sum (y - yhat)^2 + (l2/N) sum relu(y - yhat)^2.
double heatmap_loss(const Heatmap& pred, const Heatmap& gt, double lambda1, double lambda2);

// Multiplies the window x window region around each detection by that
// detection's maximum node probability; pixels under several windows take
// the largest multiplier, uncovered pixels are left alone.
Heatmap correct_heatmap(const Heatmap& hm, const std::vector<LandmarkDetection>& detections,
                        const std::vector<double>& node_probs, int window);

}  // namespace stent
