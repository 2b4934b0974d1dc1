#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <queue>

#include "oracles.hpp"
#include "stent/gcn.hpp"
#include "stent/rng.hpp"

using namespace stent;
using namespace stent::testing;

namespace {

StentGraph tiny_graph(int frames, const std::vector<int>& counts, int dim, std::uint64_t seed,
                      double edge_w = 1.0) {
  rng::Stream s(seed);
  StentGraph g;
  g.num_frames = frames;
  std::vector<std::vector<int>> ids(static_cast<std::size_t>(frames));
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < counts[static_cast<std::size_t>(t)]; ++k) {
      GraphNode n;
      n.frame = t;
      LandmarkDetection a, b;
      a.position = {10.0 * k, 0.0};
      b.position = {10.0 * k + 20.0, 0.0};
      a.frame = b.frame = t;
      n.candidate = make_candidate(a, b);
      n.feature.values.resize(static_cast<std::size_t>(dim));
      for (double& v : n.feature.values) v = s.uniform(-1, 1);
      ids[static_cast<std::size_t>(t)].push_back(static_cast<int>(g.nodes.size()));
      g.nodes.push_back(std::move(n));
    }
  }
  for (int t = 0; t + 1 < frames; ++t)
    for (int a : ids[static_cast<std::size_t>(t)])
      for (int b : ids[static_cast<std::size_t>(t + 1)]) g.edges.push_back({a, b, edge_w});
  return g;
}

Mat identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("weighted convolution: isolated node is a pure self-loop") {
  StentGraph g = tiny_graph(1, {1}, 3, 5);
  g.nodes[0].feature.values = {0.5, -0.3, 0.8};
  const auto out = wgcl_forward(g, identity(3), Vec(3, 0.0));
  CHECK(out[0][0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out[0][1] == 0.0);  // ReLU clips the negative component
  CHECK(out[0][2] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("weighted convolution: two equal nodes under a unit edge") {
  StentGraph g = tiny_graph(2, {1, 1}, 3, 5, 1.0);
  g.nodes[0].feature.values = {0.4, -0.2, 0.9};
  g.nodes[1].feature.values = g.nodes[0].feature.values;
  const auto out = wgcl_forward(g, identity(3), Vec(3, 0.0));
  // dhat = 2, aggregation returns the shared feature
  CHECK(out[0][0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(out[1][2] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(out[0][1] == 0.0);
}

TEST_CASE("weighted convolution equals the dense-matrix evaluation") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const StentGraph g = random_graph(seed, 6);
    if (g.nodes.empty()) continue;
    rng::Stream s(seed + 1000);
    Mat theta(4, 6);
    for (double& v : theta.a) v = s.uniform(-1, 1);
    Vec bias(4);
    for (double& v : bias) v = s.uniform(-0.5, 0.5);
    const auto fast = wgcl_forward(g, theta, bias);
    const auto dense = dense_wgcl(g, theta, bias);
    REQUIRE(fast.size() == dense.size());
    for (std::size_t i = 0; i < fast.size(); ++i)
      for (std::size_t r = 0; r < fast[i].size(); ++r)
        CHECK(std::abs(fast[i][r] - dense[i][r]) < 1e-10);
  }
}

TEST_CASE("edge convolution: isolated nodes give zero vectors") {
  const StentGraph g = tiny_graph(1, {2}, 3, 6);
  std::vector<Vec> x = {{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}};
  Mat w(2, 6);
  Vec b(2, 0.5);
  const auto out = ecl_forward(neighbor_lists(g), x, w, b);
  CHECK(out[0] == Vec(2, 0.0));
  CHECK(out[1] == Vec(2, 0.0));
}

TEST_CASE("edge convolution: a picked-neighbor map routes features across") {
  const StentGraph g = tiny_graph(2, {1, 1}, 2, 6);
  std::vector<Vec> x = {{0.7, 0.2}, {0.1, 0.9}};
  // edge function selects the neighbor half of the concatenation
  Mat w(2, 4);
  w(0, 2) = 1.0;
  w(1, 3) = 1.0;
  Vec b(2, 0.0);
  const auto out = ecl_forward(neighbor_lists(g), x, w, b);
  CHECK(out[0][0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(out[0][1] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(out[1][0] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(out[1][1] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("edge convolution equals the directed-edge brute force") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const StentGraph g = random_graph(seed, 5);
    if (g.nodes.empty()) continue;
    rng::Stream s(seed + 2000);
    std::vector<Vec> x(g.nodes.size(), Vec(5));
    for (Vec& v : x)
      for (double& e : v) e = s.uniform(-1, 1);
    Mat w(3, 10);
    for (double& v : w.a) v = s.uniform(-1, 1);
    Vec b(3);
    for (double& v : b) v = s.uniform(-0.5, 0.5);
    const auto fast = ecl_forward(neighbor_lists(g), x, w, b);
    const auto slow = brute_ecl(g, x, w, b);
    for (std::size_t i = 0; i < fast.size(); ++i)
      for (std::size_t r = 0; r < fast[i].size(); ++r)
        CHECK(std::abs(fast[i][r] - slow[i][r]) < 1e-10);
  }
}

TEST_CASE("zero head weights give one half everywhere") {
  const StentGraph g = tiny_graph(3, {2, 1, 2}, 8, 7);
  GcnDims dims;
  dims.input = 8;
  dims.h1 = 4;
  dims.h2 = 3;
  dims.h3 = 2;
  GcnParams p = init_gcn_params(dims, 3);
  std::fill(p.head_w.begin(), p.head_w.end(), 0.0);
  p.head_b = 0.0;
  for (const double prob : gcn_forward(g, p)) CHECK(prob == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("with no edges the output is driven by the bypass alone") {
  StentGraph g = tiny_graph(3, {1, 1, 1}, 6, 8);
  g.edges.clear();
  GcnDims dims;
  dims.input = 6;
  dims.h1 = 4;
  dims.h2 = 3;
  dims.h3 = 2;
  const GcnParams p = init_gcn_params(dims, 9);
  const auto probs = gcn_forward(g, p);

  // recompute from the bypass and head only; the gcn branch is all zeros
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    Vec fc = affine(p.fc_w, g.nodes[i].feature.values, p.fc_b);
    for (double& v : fc) v = std::max(0.0, v);
    double z = p.head_b;
    for (int r = 0; r < dims.h1; ++r)
      z += p.head_w[static_cast<std::size_t>(dims.h3 + r)] * fc[static_cast<std::size_t>(r)];
    CHECK(probs[i] == doctest::Approx(1.0 / (1.0 + std::exp(-z))).epsilon(1e-12));
  }
}

TEST_CASE("full forward matches the straight-line reference") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const StentGraph g = random_graph(seed, 7);
    if (g.nodes.empty()) continue;
    GcnDims dims;
    dims.input = 7;
    dims.h1 = 5;
    dims.h2 = 4;
    dims.h3 = 3;
    const GcnParams p = init_gcn_params(dims, seed + 10);
    const auto fast = gcn_forward(g, p);
    const auto ref = reference_gcn_forward(g, p);
    for (std::size_t i = 0; i < fast.size(); ++i) CHECK(std::abs(fast[i] - ref[i]) < 1e-10);
  }
}

TEST_CASE("probabilities stay strictly inside (0,1)") {
  const StentGraph g = random_graph(3, 6);
  GcnDims dims;
  dims.input = 6;
  dims.h1 = 4;
  dims.h2 = 3;
  dims.h3 = 2;
  const GcnParams p = init_gcn_params(dims, 77);
  for (const double prob : gcn_forward(g, p)) {
    CHECK(prob > 0.0);
    CHECK(prob < 1.0);
  }
}

TEST_CASE("a perturbed node only reaches distance three after the stack") {
  const StentGraph g = tiny_graph(6, {2, 2, 2, 2, 2, 2}, 5, 11, 0.7);
  GcnDims dims;
  dims.input = 5;
  dims.h1 = 4;
  dims.h2 = 3;
  dims.h3 = 2;
  const GcnParams p = init_gcn_params(dims, 5);
  const auto base = gcn_forward(g, p);

  StentGraph perturbed = g;
  const int target = 0;
  perturbed.nodes[static_cast<std::size_t>(target)].feature.values[0] += 0.37;
  const auto moved = gcn_forward(perturbed, p);

  // BFS distances from the perturbed node
  std::vector<int> dist(g.nodes.size(), -1);
  std::queue<int> q;
  dist[static_cast<std::size_t>(target)] = 0;
  q.push(target);
  const auto nbrs = neighbor_lists(g);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const int v : nbrs[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        q.push(v);
      }
    }
  }
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (dist[i] < 0 || dist[i] > 3) CHECK(base[i] == moved[i]);
  }
  // and the signal does reach the immediate neighborhood
  CHECK(base[0] != moved[0]);
}

TEST_CASE("one edge convolution only reaches direct neighbors") {
  const StentGraph g = tiny_graph(5, {1, 1, 1, 1, 1}, 4, 19, 0.9);
  rng::Stream s(23);
  std::vector<Vec> x(g.nodes.size(), Vec(4));
  for (Vec& v : x)
    for (double& e : v) e = s.uniform(-1, 1);
  Mat w(3, 8);
  for (double& v : w.a) v = s.uniform(-1, 1);
  Vec b(3, 0.1);
  const auto base = ecl_forward(neighbor_lists(g), x, w, b);
  auto x2 = x;
  x2[2][1] += 0.4;  // middle of the chain
  const auto moved = ecl_forward(neighbor_lists(g), x2, w, b);
  CHECK(base[0] == moved[0]);  // distance 2
  CHECK(base[4] == moved[4]);
  CHECK(base[1] != moved[1]);  // distance 1
  CHECK(base[3] != moved[3]);
}

TEST_CASE("node relabeling permutes the outputs") {
  const StentGraph g = random_graph(17, 6);
  if (g.nodes.size() < 2) return;
  GcnDims dims;
  dims.input = 6;
  dims.h1 = 4;
  dims.h2 = 3;
  dims.h3 = 2;
  const GcnParams p = init_gcn_params(dims, 41);
  const auto base = gcn_forward(g, p);

  std::vector<int> perm(g.nodes.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  rng::Stream s(99);
  s.shuffle(perm);

  StentGraph shuffled;
  shuffled.num_frames = g.num_frames;
  shuffled.nodes.resize(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    shuffled.nodes[static_cast<std::size_t>(perm[i])] = g.nodes[i];
  for (const GraphEdge& e : g.edges)
    shuffled.edges.push_back(
        {perm[static_cast<std::size_t>(e.a)], perm[static_cast<std::size_t>(e.b)], e.weight});
  const auto moved = gcn_forward(shuffled, p);
  for (std::size_t i = 0; i < base.size(); ++i)
    CHECK(moved[static_cast<std::size_t>(perm[i])] ==
          doctest::Approx(base[i]).epsilon(1e-12));
}

TEST_CASE("total loss composes its three terms") {
  TotalLossInputs in;
  CHECK(total_loss(in, 1, 2, 1, 2, {1, 1}, {1, 1}) == 0.0);

  // logits and probabilities crafted for known cross entropies
  in.object_logits = {{0.0, 0.0}};
  in.object_labels = {1};
  in.node_probs = {0.5};
  in.node_labels = {1};
  const double ce = std::log(2.0);
  CHECK(total_loss(in, 1, 2, 1.0, 2.0, {1, 1}, {1, 1}) ==
        doctest::Approx(ce + 2.0 * ce).epsilon(1e-12));
  // doubling beta doubles only the node term
  CHECK(total_loss(in, 1, 2, 1.0, 4.0, {1, 1}, {1, 1}) ==
        doctest::Approx(ce + 4.0 * ce).epsilon(1e-12));
  CHECK(total_loss(in, 1, 2, 2.0, 2.0, {1, 1}, {1, 1}) ==
        doctest::Approx(2.0 * ce + 2.0 * ce).epsilon(1e-12));
}

TEST_CASE("hand-set two-node graph passes a tight gradient check") {
  StentGraph g = tiny_graph(2, {1, 1}, 2, 31, 0.8);
  g.nodes[0].feature.values = {0.3, -0.6};
  g.nodes[1].feature.values = {-0.2, 0.5};
  GcnDims dims;
  dims.input = 2;
  dims.h1 = 2;
  dims.h2 = 2;
  dims.h3 = 2;
  const GcnParams p = init_gcn_params(dims, 13);
  const double err = grad_check(p, g, {1, 0}, {1.0, 5.0}, 1e-6);
  CHECK(err < 1e-6);
}

TEST_CASE("gradient check over random graphs and initializations") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const StentGraph g = random_graph(seed + 40, 6);
    if (g.nodes.empty()) continue;
    GcnDims dims;
    dims.input = 6;
    dims.h1 = 4;
    dims.h2 = 3;
    dims.h3 = 2;
    const GcnParams p = init_gcn_params(dims, seed);
    std::vector<int> labels(g.nodes.size());
    rng::Stream s(seed + 100);
    for (int& y : labels) y = static_cast<int>(s.below(2));
    CHECK(grad_check(p, g, labels, {1.0, 5.0}, 1e-6) < 1e-4);
  }
}

TEST_CASE("training descends on a fixed toy set and is seed-deterministic") {
  std::vector<TrainClip> clips;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    TrainClip clip;
    clip.graph = random_graph(seed + 60, 6);
    rng::Stream s(seed);
    for (std::size_t i = 0; i < clip.graph.nodes.size(); ++i)
      clip.labels.push_back(static_cast<int>(s.below(2)));
    if (clip.graph.nodes.empty()) continue;
    bool has0 = false, has1 = false;
    for (int y : clip.labels) (y ? has1 : has0) = true;
    if (!has0) clip.labels[0] = 0;
    if (!has1) clip.labels[0] = 1;
    clips.push_back(std::move(clip));
  }
  GcnTrainConfig cfg;
  cfg.dims.input = 6;
  cfg.dims.h1 = 4;
  cfg.dims.h2 = 3;
  cfg.dims.h3 = 2;
  cfg.epochs = 60;
  cfg.learning_rate = 1e-3;  // full batch
  const GcnTrainResult result = train_gcn(clips, cfg);
  for (std::size_t e = 1; e < result.loss_trace.size(); ++e)
    CHECK(result.loss_trace[e] <= result.loss_trace[e - 1] + 1e-12);

  const GcnTrainResult again = train_gcn(clips, cfg);
  CHECK(again.params.wgcl_w.a == result.params.wgcl_w.a);
  CHECK(again.params.head_w == result.params.head_w);
  CHECK(again.loss_trace == result.loss_trace);
}

TEST_CASE("degenerate training inputs are rejected") {
  CHECK_THROWS_AS(train_gcn({}, GcnTrainConfig{}), std::invalid_argument);

  TrainClip clip;
  clip.graph = random_graph(2, 6);
  clip.labels.assign(clip.graph.nodes.size(), 1);
  GcnTrainConfig cfg;
  cfg.dims.input = 6;
  CHECK_THROWS_AS(train_gcn({clip}, cfg), std::invalid_argument);
}

TEST_CASE("parameter text round trip is exact") {
  GcnDims dims;
  dims.input = 6;
  dims.h1 = 4;
  dims.h2 = 3;
  dims.h3 = 2;
  const GcnParams p = init_gcn_params(dims, 4242);
  const GcnParams back = parse_gcn_params(format_gcn_params(p));
  CHECK(back.wgcl_w.a == p.wgcl_w.a);
  CHECK(back.ecl1_w.a == p.ecl1_w.a);
  CHECK(back.ecl2_b == p.ecl2_b);
  CHECK(back.fc_w.a == p.fc_w.a);
  CHECK(back.head_w == p.head_w);
  CHECK(back.head_b == p.head_b);
}
