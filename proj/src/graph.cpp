#include "stent/graph.hpp"

#include <cmath>
#include <stdexcept>

namespace stent {

double angle_length_similarity(Point2 vi, Point2 vj) {
  const double ni = norm(vi), nj = norm(vj);
  if (ni == 0.0 || nj == 0.0) return 0.0;
  const double angle_term = std::abs(dot(vi, vj)) / (ni * nj);
  const double length_term = std::abs(ni - nj) / std::sqrt(ni * nj);
  return std::max(0.0, angle_term - length_term);
}

double edge_weight(const StentCandidate& oi, const StentCandidate& oj, double alpha1,
                   double alpha2) {
  const double mean_score = 0.5 * (oi.score + oj.score);
  const double sim = alpha1 * iou(oi.bbox, oj.bbox) +
                     alpha2 * angle_length_similarity(pair_vector(oi), pair_vector(oj));
  return mean_score * sim;
}

StentGraph build_graph(const std::vector<std::vector<StentCandidate>>& per_frame_candidates,
                       const std::vector<std::vector<FeatureVector>>& per_frame_features,
                       double alpha1, double alpha2) {
  if (per_frame_candidates.size() != per_frame_features.size())
    throw std::invalid_argument("build_graph: candidates and features must align per frame");
  StentGraph g;
  g.num_frames = static_cast<int>(per_frame_candidates.size());
  std::vector<std::vector<int>> ids(per_frame_candidates.size());
  for (std::size_t t = 0; t < per_frame_candidates.size(); ++t) {
    if (per_frame_candidates[t].size() != per_frame_features[t].size())
      throw std::invalid_argument("build_graph: candidates and features must align per frame");
    for (std::size_t k = 0; k < per_frame_candidates[t].size(); ++k) {
      ids[t].push_back(static_cast<int>(g.nodes.size()));
      g.nodes.push_back({static_cast<int>(t), per_frame_candidates[t][k], per_frame_features[t][k]});
    }
  }
  for (std::size_t t = 0; t + 1 < per_frame_candidates.size(); ++t) {
    for (const int a : ids[t]) {
      for (const int b : ids[t + 1]) {
        const double w = edge_weight(g.nodes[static_cast<std::size_t>(a)].candidate,
                                     g.nodes[static_cast<std::size_t>(b)].candidate, alpha1, alpha2);
        g.edges.push_back({a, b, w});
      }
    }
  }
  return g;
}

std::vector<std::vector<std::pair<int, double>>> adjacency(const StentGraph& g) {
  std::vector<std::vector<std::pair<int, double>>> adj(g.nodes.size());
  for (const GraphEdge& e : g.edges) {
    adj[static_cast<std::size_t>(e.a)].emplace_back(e.b, e.weight);
    adj[static_cast<std::size_t>(e.b)].emplace_back(e.a, e.weight);
  }
  return adj;
}

std::vector<std::vector<int>> neighbor_lists(const StentGraph& g) {
  std::vector<std::vector<int>> adj(g.nodes.size());
  for (const GraphEdge& e : g.edges) {
    adj[static_cast<std::size_t>(e.a)].push_back(e.b);
    adj[static_cast<std::size_t>(e.b)].push_back(e.a);
  }
  return adj;
}

}  // namespace stent
