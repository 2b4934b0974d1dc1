#pragma once

#include <array>
#include <vector>

#include "stent/core.hpp"
#include "stent/track.hpp"

namespace stent {

struct FrameMatch {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  int tn = 0;
  // Euclidean landmark distances of matched (true positive) predictions.
  std::vector<double> matched_distances;
};

struct MatchResult {
  std::vector<FrameMatch> frames;

  long tp() const;
  long fp() const;
  long fn() const;
  long tn() const;
  std::vector<double> all_matched_distances() const;
};

// Greedy landmark matching per frame: all (prediction landmark, truth
// landmark) pairs are considered in ascending distance order (ties by
// prediction index), each side matched at most once. A prediction is a true
// positive only when both of its landmarks pair within the radius. A present
// truth without a true positive is a false negative; a frame with neither
// truth nor predictions is a true negative.
MatchResult match_predictions(const std::vector<std::vector<std::array<Point2, 2>>>& predictions,
                              const GroundTruth& gt, double radius = 5.0);
MatchResult match_predictions(const Track& track, const GroundTruth& gt, double radius = 5.0);

struct DetectionMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
};

// Zero denominators map precision/recall/f1 to 0; accuracy of an all-zero
// count table is 1 by convention.
DetectionMetrics detection_metrics(const MatchResult& m);

struct LocalizationMetrics {
  bool defined = false;  // false when nothing matched; never NaN
  double mae = 0.0;      // px
  double rmse = 0.0;     // px
  int count = 0;
};

LocalizationMetrics localization_metrics(const MatchResult& m);

}  // namespace stent
