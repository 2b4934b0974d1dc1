#include "stent/eval.hpp"

#include <algorithm>
#include <cmath>

namespace stent {

long MatchResult::tp() const {
  long s = 0;
  for (const FrameMatch& f : frames) s += f.tp;
  return s;
}
long MatchResult::fp() const {
  long s = 0;
  for (const FrameMatch& f : frames) s += f.fp;
  return s;
}
long MatchResult::fn() const {
  long s = 0;
  for (const FrameMatch& f : frames) s += f.fn;
  return s;
}
long MatchResult::tn() const {
  long s = 0;
  for (const FrameMatch& f : frames) s += f.tn;
  return s;
}

std::vector<double> MatchResult::all_matched_distances() const {
  std::vector<double> out;
  for (const FrameMatch& f : frames)
    out.insert(out.end(), f.matched_distances.begin(), f.matched_distances.end());
  return out;
}

MatchResult match_predictions(const std::vector<std::vector<std::array<Point2, 2>>>& predictions,
                              const GroundTruth& gt, double radius) {
  MatchResult result;
  const std::size_t frames = std::max(predictions.size(), gt.frames.size());
  result.frames.resize(frames);

  for (std::size_t t = 0; t < frames; ++t) {
    FrameMatch& fm = result.frames[t];
    const bool truth_present = t < gt.frames.size() && gt.frames[t].present;
    const auto& preds = t < predictions.size() ? predictions[t]
                                               : std::vector<std::array<Point2, 2>>{};
    if (preds.empty()) {
      if (truth_present)
        fm.fn = 1;
      else
        fm.tn = 1;
      continue;
    }
    if (!truth_present) {
      fm.fp = static_cast<int>(preds.size());
      continue;
    }

    const Point2 truth[2] = {gt.frames[t].m1, gt.frames[t].m2};
    struct Pairing {
      double dist;
      int pred;      // prediction index
      int landmark;  // 0 or 1 within the prediction
      int truth;     // 0 or 1
    };
    std::vector<Pairing> pairings;
    for (std::size_t p = 0; p < preds.size(); ++p)
      for (int l = 0; l < 2; ++l)
        for (int g = 0; g < 2; ++g)
          pairings.push_back({distance(preds[p][static_cast<std::size_t>(l)], truth[g]),
                              static_cast<int>(p), l, g});
    std::sort(pairings.begin(), pairings.end(), [](const Pairing& a, const Pairing& b) {
      if (a.dist != b.dist) return a.dist < b.dist;
      if (a.pred != b.pred) return a.pred < b.pred;
      if (a.landmark != b.landmark) return a.landmark < b.landmark;
      return a.truth < b.truth;
    });

    // dist[pred][landmark] = match distance, negative when unmatched
    std::vector<std::array<double, 2>> matched(preds.size(), {-1.0, -1.0});
    bool truth_used[2] = {false, false};
    for (const Pairing& p : pairings) {
      if (truth_used[p.truth]) continue;
      if (matched[static_cast<std::size_t>(p.pred)][static_cast<std::size_t>(p.landmark)] >= 0.0)
        continue;
      truth_used[p.truth] = true;
      matched[static_cast<std::size_t>(p.pred)][static_cast<std::size_t>(p.landmark)] = p.dist;
    }

    for (std::size_t p = 0; p < preds.size(); ++p) {
      const double d0 = matched[p][0], d1 = matched[p][1];
      if (d0 >= 0.0 && d0 < radius && d1 >= 0.0 && d1 < radius) {
        fm.tp += 1;
        fm.matched_distances.push_back(d0);
        fm.matched_distances.push_back(d1);
      } else {
        fm.fp += 1;
      }
    }
    if (fm.tp == 0) fm.fn = 1;
  }
  return result;
}

MatchResult match_predictions(const Track& track, const GroundTruth& gt, double radius) {
  std::vector<std::vector<std::array<Point2, 2>>> preds(track.frames.size());
  for (std::size_t t = 0; t < track.frames.size(); ++t) {
    if (track.frames[t].present) {
      preds[t].push_back({track.frames[t].candidate.first.position,
                          track.frames[t].candidate.second.position});
    }
  }
  return match_predictions(preds, gt, radius);
}

DetectionMetrics detection_metrics(const MatchResult& m) {
  const double tp = static_cast<double>(m.tp());
  const double fp = static_cast<double>(m.fp());
  const double fn = static_cast<double>(m.fn());
  const double tn = static_cast<double>(m.tn());
  DetectionMetrics d;
  d.precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
  d.recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
  d.f1 = 2.0 * tp + fn + fp > 0.0 ? 2.0 * tp / (2.0 * tp + fn + fp) : 0.0;
  const double total = tp + fn + tn + fp;
  d.accuracy = total > 0.0 ? (tp + tn) / total : 1.0;
  return d;
}

LocalizationMetrics localization_metrics(const MatchResult& m) {
  LocalizationMetrics loc;
  const std::vector<double> dists = m.all_matched_distances();
  if (dists.empty()) return loc;
  double sum = 0.0, sumsq = 0.0;
  for (double d : dists) {
    sum += d;
    sumsq += d * d;
  }
  loc.defined = true;
  loc.count = static_cast<int>(dists.size());
  loc.mae = sum / static_cast<double>(dists.size());
  loc.rmse = std::sqrt(sumsq / static_cast<double>(dists.size()));
  return loc;
}

}  // namespace stent
