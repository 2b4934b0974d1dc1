#include "stent/track.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

namespace stent {

std::vector<std::pair<int, int>> clip_windows(int total, int length, int stride) {
  if (length < 2) throw std::invalid_argument("clip_windows: length must be >= 2");
  if (stride < 1) throw std::invalid_argument("clip_windows: stride must be >= 1");
  std::vector<std::pair<int, int>> windows;
  if (total <= 0) return windows;
  if (total <= length) {
    windows.emplace_back(0, total);
    return windows;
  }
  int start = 0;
  for (; start + length <= total; start += stride) windows.emplace_back(start, start + length);
  if (windows.back().second != total) windows.emplace_back(total - length, total);
  return windows;
}

namespace {

using CandidateKey = std::tuple<int, double, double, double, double>;

CandidateKey key_of(int frame, const StentCandidate& c) {
  return {frame, c.first.position.x, c.first.position.y, c.second.position.x,
          c.second.position.y};
}

struct MergedCandidate {
  StentCandidate candidate;
  double probability = 0.0;
};

// One clip pass: propose, build the graph, classify nodes. Detections and
// results are indexed relative to the clip.
struct ClipResult {
  std::vector<std::vector<StentCandidate>> candidates;
  std::vector<std::vector<FeatureVector>> features;
  NodeProbabilities probs;
  StentGraph graph;
};

ClipResult score_clip(const Sequence& seq, int start, int end,
                      const std::vector<std::vector<LandmarkDetection>>& dets,
                      const PipelineConfig& cfg, const Models& models) {
  ClipResult r;
  const int len = end - start;
  r.candidates.resize(static_cast<std::size_t>(len));
  r.features.resize(static_cast<std::size_t>(len));
  for (int t = 0; t < len; ++t) {
    r.candidates[static_cast<std::size_t>(t)] =
        propose_candidates(dets[static_cast<std::size_t>(start + t)], cfg.proposal);
    for (const StentCandidate& c : r.candidates[static_cast<std::size_t>(t)])
      r.features[static_cast<std::size_t>(t)].push_back(
          patch_descriptor(seq.frames[static_cast<std::size_t>(start + t)], c, cfg.proposal));
  }
  r.graph = build_graph(r.candidates, r.features, cfg.alpha1, cfg.alpha2);
  r.probs = r.graph.nodes.empty() ? NodeProbabilities{} : gcn_forward(r.graph, models.gcn);
  return r;
}

// Max node probability per detection: a detection inherits the best
// probability among candidates containing it; detections outside every
// candidate carry no graph evidence and keep multiplier 1.
std::vector<double> detection_multipliers(const std::vector<LandmarkDetection>& dets,
                                          const std::vector<StentCandidate>& candidates,
                                          const std::vector<double>& cand_probs) {
  std::vector<double> mult(dets.size(), -1.0);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    for (const LandmarkDetection* lm : {&candidates[c].first, &candidates[c].second}) {
      for (std::size_t d = 0; d < dets.size(); ++d) {
        if (dets[d].position.x == lm->position.x && dets[d].position.y == lm->position.y) {
          mult[d] = std::max(mult[d], cand_probs[c]);
        }
      }
    }
  }
  for (double& m : mult)
    if (m < 0.0) m = 1.0;
  return mult;
}

Track select_track(const std::map<CandidateKey, MergedCandidate>& merged, int num_frames,
                   const PipelineConfig& cfg) {
  Track track;
  track.frames.resize(static_cast<std::size_t>(num_frames));

  if (cfg.selection_mode == SelectionMode::kThresholdArgmax) {
    // Map iteration is key-ordered, so strict improvement keeps the
    // lexicographically smallest winner under ties.
    for (const auto& [key, mc] : merged) {
      const int frame = std::get<0>(key);
      auto& entry = track.frames[static_cast<std::size_t>(frame)];
      if (mc.probability < cfg.selection_threshold) continue;
      if (!entry.present || mc.probability > entry.probability) {
        entry.present = true;
        entry.candidate = mc.candidate;
        entry.probability = mc.probability;
      }
    }
    return track;
  }

  // Top-two-markers mode: rank landmarks by the best probability of any
  // candidate containing them, then pair the two best.
  struct LandmarkSupport {
    LandmarkDetection det;
    double support = 0.0;
  };
  std::vector<std::map<std::pair<double, double>, LandmarkSupport>> per_frame(
      static_cast<std::size_t>(num_frames));
  for (const auto& [key, mc] : merged) {
    const int frame = std::get<0>(key);
    for (const LandmarkDetection* lm : {&mc.candidate.first, &mc.candidate.second}) {
      auto& slot = per_frame[static_cast<std::size_t>(frame)][{lm->position.x, lm->position.y}];
      if (slot.support < mc.probability || (slot.support == 0.0 && slot.det.score == 0.0)) {
        slot.det = *lm;
        slot.support = std::max(slot.support, mc.probability);
      }
    }
  }
  for (int t = 0; t < num_frames; ++t) {
    const auto& supports = per_frame[static_cast<std::size_t>(t)];
    if (supports.size() < 2) continue;
    // two best by (support desc, position asc)
    const LandmarkSupport* best1 = nullptr;
    const LandmarkSupport* best2 = nullptr;
    for (const auto& [pos, ls] : supports) {
      (void)pos;
      if (!best1 || ls.support > best1->support) {
        best2 = best1;
        best1 = &ls;
      } else if (!best2 || ls.support > best2->support) {
        best2 = &ls;
      }
    }
    StentCandidate pair = make_candidate(best1->det, best2->det);
    auto& entry = track.frames[static_cast<std::size_t>(t)];
    entry.present = true;
    entry.candidate = pair;
    const auto it = merged.find(key_of(t, pair));
    entry.probability = it != merged.end() ? it->second.probability
                                           : std::min(best1->support, best2->support);
  }
  return track;
}

Track run_pipeline(const Sequence& seq, std::vector<std::vector<LandmarkDetection>> dets,
                   std::vector<Heatmap> heatmaps, const PipelineConfig& cfg,
                   const Models& models) {
  const int total = static_cast<int>(seq.frames.size());
  Track empty;
  if (total == 0) return empty;

  const bool can_correct = !heatmaps.empty();
  std::map<CandidateKey, MergedCandidate> merged;

  for (const auto& [start, end] : clip_windows(total, cfg.clip_length, cfg.clip_stride)) {
    // Correction rewrites this clip's detections locally; other clips see
    // the originals.
    std::vector<std::vector<LandmarkDetection>> clip_dets(
        dets.begin() + start, dets.begin() + end);
    std::vector<Heatmap> clip_maps;
    if (can_correct)
      clip_maps.assign(heatmaps.begin() + start, heatmaps.begin() + end);

    std::vector<std::vector<LandmarkDetection>> padded(static_cast<std::size_t>(total));
    ClipResult result;
    const int passes = can_correct ? std::max(0, cfg.correction_passes) : 0;
    for (int pass = 0;; ++pass) {
      for (int t = 0; t < end - start; ++t)
        padded[static_cast<std::size_t>(start + t)] = clip_dets[static_cast<std::size_t>(t)];
      result = score_clip(seq, start, end, padded, cfg, models);
      if (pass == passes) break;
      // Scale each heatmap by per-detection support, then re-extract and
      // re-propose from the corrected maps.
      std::vector<std::vector<double>> probs_by_frame(static_cast<std::size_t>(end - start));
      for (std::size_t n = 0; n < result.graph.nodes.size(); ++n)
        probs_by_frame[static_cast<std::size_t>(result.graph.nodes[n].frame)].push_back(
            result.probs[n]);
      for (int t = 0; t < end - start; ++t) {
        const auto mult = detection_multipliers(clip_dets[static_cast<std::size_t>(t)],
                                                result.candidates[static_cast<std::size_t>(t)],
                                                probs_by_frame[static_cast<std::size_t>(t)]);
        clip_maps[static_cast<std::size_t>(t)] =
            correct_heatmap(clip_maps[static_cast<std::size_t>(t)],
                            clip_dets[static_cast<std::size_t>(t)], mult, cfg.correction_window);
        auto fresh = extract_peaks(clip_maps[static_cast<std::size_t>(t)], cfg.detector.threshold,
                                   cfg.detector.nms_radius, start + t);
        if (static_cast<int>(fresh.size()) > cfg.detector.max_detections)
          fresh.resize(static_cast<std::size_t>(cfg.detector.max_detections));
        clip_dets[static_cast<std::size_t>(t)] = std::move(fresh);
      }
    }

    for (std::size_t n = 0; n < result.graph.nodes.size(); ++n) {
      const GraphNode& node = result.graph.nodes[n];
      const int frame = start + node.frame;
      auto& slot = merged[key_of(frame, node.candidate)];
      if (result.probs[n] >= slot.probability) {
        slot.candidate = node.candidate;
        slot.probability = std::max(slot.probability, result.probs[n]);
      }
    }
  }
  return select_track(merged, total, cfg);
}

}  // namespace

Track track_sequence(const Sequence& seq, const PipelineConfig& cfg, const Models& models) {
  std::vector<std::vector<LandmarkDetection>> dets(seq.frames.size());
  std::vector<Heatmap> maps(seq.frames.size());
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    maps[t] = tophat_response(seq.frames[t], cfg.detector);
    auto peaks =
        extract_peaks(maps[t], cfg.detector.threshold, cfg.detector.nms_radius, static_cast<int>(t));
    if (static_cast<int>(peaks.size()) > cfg.detector.max_detections)
      peaks.resize(static_cast<std::size_t>(cfg.detector.max_detections));
    dets[t] = std::move(peaks);
  }
  return run_pipeline(seq, std::move(dets), std::move(maps), cfg, models);
}

Track track_sequence(const Sequence& seq,
                     const std::vector<std::vector<LandmarkDetection>>& detections,
                     const PipelineConfig& cfg, const Models& models) {
  if (detections.size() != seq.frames.size())
    throw std::invalid_argument("track_sequence: detections must cover every frame");
  return run_pipeline(seq, detections, {}, cfg, models);
}

ViterbiResult viterbi_decode(const StentGraph& graph, const std::vector<double>& node_scores,
                             int num_frames) {
  if (node_scores.size() != graph.nodes.size())
    throw std::invalid_argument("viterbi_decode: node scores must align with nodes");
  constexpr double kEdgeEps = 1e-9;
  ViterbiResult result;
  result.track.frames.resize(static_cast<std::size_t>(num_frames));
  if (graph.nodes.empty()) return result;

  std::vector<std::vector<int>> by_frame(static_cast<std::size_t>(num_frames));
  for (std::size_t n = 0; n < graph.nodes.size(); ++n)
    by_frame[static_cast<std::size_t>(graph.nodes[n].frame)].push_back(static_cast<int>(n));

  std::map<std::pair<int, int>, double> weight;
  for (const GraphEdge& e : graph.edges) weight[{e.a, e.b}] = e.weight;

  int t = 0;
  while (t < num_frames) {
    if (by_frame[static_cast<std::size_t>(t)].empty()) {
      ++t;
      continue;
    }
    int run_end = t;
    while (run_end < num_frames && !by_frame[static_cast<std::size_t>(run_end)].empty()) ++run_end;

    // dp over the run [t, run_end)
    std::map<int, double> dp;
    std::map<int, int> from;
    for (const int n : by_frame[static_cast<std::size_t>(t)])
      dp[n] = std::log(std::max(0.0, node_scores[static_cast<std::size_t>(n)]));
    for (int f = t + 1; f < run_end; ++f) {
      std::map<int, double> next;
      for (const int v : by_frame[static_cast<std::size_t>(f)]) {
        bool first = true;
        double best = -std::numeric_limits<double>::infinity();
        int arg = -1;
        for (const int u : by_frame[static_cast<std::size_t>(f - 1)]) {
          const auto it = weight.find({u, v});
          const double w = it != weight.end() ? it->second : 0.0;
          double cand = dp[u];
          cand += std::log(w + kEdgeEps);
          cand += std::log(std::max(0.0, node_scores[static_cast<std::size_t>(v)]));
          if (first || cand > best) {  // strict: ties keep the lower predecessor index
            best = cand;
            arg = u;
            first = false;
          }
        }
        next[v] = best;
        from[v] = arg;
      }
      dp = std::move(next);
    }

    bool first = true;
    double best = -std::numeric_limits<double>::infinity();
    int arg = -1;
    for (const auto& [n, v] : dp) {
      if (first || v > best) {
        best = v;
        arg = n;
        first = false;
      }
    }
    result.objective += best;
    for (int f = run_end - 1; f >= t; --f) {
      auto& entry = result.track.frames[static_cast<std::size_t>(f)];
      entry.present = true;
      entry.candidate = graph.nodes[static_cast<std::size_t>(arg)].candidate;
      entry.probability = node_scores[static_cast<std::size_t>(arg)];
      if (f > t) arg = from[arg];
    }
    t = run_end;
  }
  return result;
}

Track viterbi_track(const StentGraph& graph, const std::vector<double>& node_scores,
                    int num_frames) {
  return viterbi_decode(graph, node_scores, num_frames).track;
}

}  // namespace stent
