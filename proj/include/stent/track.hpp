#pragma once

#include <vector>

#include "stent/core.hpp"
#include "stent/detect.hpp"
#include "stent/gcn.hpp"
#include "stent/graph.hpp"
#include "stent/propose.hpp"

namespace stent {

enum class SelectionMode {
  kThresholdArgmax,  // best node per frame when it clears the threshold
  kTopTwoMarkers,    // two best-supported landmarks form the frame's pair
};

struct PipelineConfig {
  DetectorParams detector;
  ProposalConfig proposal;
  double alpha1 = 0.5;
  double alpha2 = 0.5;
  double selection_threshold = 0.6;
  SelectionMode selection_mode = SelectionMode::kThresholdArgmax;
  int correction_window = 9;
  int correction_passes = 1;
  int clip_length = 10;
  int clip_stride = 5;
};

struct Models {
  GcnParams gcn;
  MlpParams mlp;
};

struct Track {
  struct Entry {
    bool present = false;
    StentCandidate candidate;
    double probability = 0.0;
  };
  std::vector<Entry> frames;
};

// Clip windows covering [0, total): fixed stride, with a final window pinned
// to the tail so every frame is covered.
std::vector<std::pair<int, int>> clip_windows(int total, int length, int stride);

// Full inference from raw frames: top-hat detection, pair proposal, graph
// construction, node classification, heatmap correction passes, overlapping
// clips merged by maximum node probability, then per-frame selection.
Track track_sequence(const Sequence& seq, const PipelineConfig& cfg, const Models& models);

// Same pipeline driven by pre-made detection lists. There is no detector
// heatmap in this path, so correction passes do not apply.
Track track_sequence(const Sequence& seq,
                     const std::vector<std::vector<LandmarkDetection>>& detections,
                     const PipelineConfig& cfg, const Models& models);

// Dynamic-programming baseline: picks one candidate per frame maximizing
// sum of log node scores plus log (edge weight + 1e-9) along the path.
// Frames without candidates split the chain; each run is decoded alone.
// Ties break toward the lower node index.
struct ViterbiResult {
  Track track;
  double objective = 0.0;  // summed over chains
};

ViterbiResult viterbi_decode(const StentGraph& graph, const std::vector<double>& node_scores,
                             int num_frames);
Track viterbi_track(const StentGraph& graph, const std::vector<double>& node_scores,
                    int num_frames);

}  // namespace stent
