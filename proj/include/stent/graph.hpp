#pragma once

#include <utility>
#include <vector>

#include "stent/core.hpp"
#include "stent/propose.hpp"

namespace stent {

struct GraphNode {
  int frame = 0;  // index within the clip the graph was built from
  StentCandidate candidate;
  FeatureVector feature;
};

struct GraphEdge {
  int a = 0;  // node indices with frame(b) == frame(a) + 1 and a < b
  int b = 0;
  double weight = 0.0;
};

// Spatiotemporal candidate graph: one node per candidate, complete bipartite
// edges between adjacent frames, each undirected edge stored once.
struct StentGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  int num_frames = 0;
};

// Similarity of two landmark-pair vectors by angle and length:
// max(0, |vi.vj| / (|vi||vj|) - ||vi|-|vj|| / sqrt(|vi||vj|)).
// A zero-length vector makes the expression undefined and yields 0.
double angle_length_similarity(Point2 vi, Point2 vj);

// Mean candidate score times the weighted combination of box IoU and
// pair-vector similarity.
double edge_weight(const StentCandidate& oi, const StentCandidate& oj, double alpha1,
                   double alpha2);

StentGraph build_graph(const std::vector<std::vector<StentCandidate>>& per_frame_candidates,
                       const std::vector<std::vector<FeatureVector>>& per_frame_features,
                       double alpha1, double alpha2);

// Per-node (neighbor index, edge weight) lists, both directions.
std::vector<std::vector<std::pair<int, double>>> adjacency(const StentGraph& g);
// Per-node neighbor index lists.
std::vector<std::vector<int>> neighbor_lists(const StentGraph& g);

}  // namespace stent
