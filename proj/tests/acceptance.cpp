// Acceptance suite: one line of output per criterion, nonzero exit when any
// fails. Expects the CLI binary path as argv[1] for the determinism checks.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "stent/enhance.hpp"
#include "stent/eval.hpp"
#include "stent/io.hpp"
#include "stent/pipeline.hpp"

using namespace stent;
using namespace stent::testing;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

bool nearly(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

LandmarkDetection det(double x, double y, double score, int frame = 0) {
  LandmarkDetection d;
  d.position = {x, y};
  d.score = score;
  d.frame = frame;
  return d;
}

Track truth_track(const GroundTruth& gt) {
  Track track;
  track.frames.resize(gt.frames.size());
  for (std::size_t t = 0; t < gt.frames.size(); ++t) {
    if (!gt.frames[t].present) continue;
    LandmarkDetection a = det(gt.frames[t].m1.x, gt.frames[t].m1.y, 1.0, static_cast<int>(t));
    LandmarkDetection b = det(gt.frames[t].m2.x, gt.frames[t].m2.y, 1.0, static_cast<int>(t));
    track.frames[t].present = true;
    track.frames[t].candidate = make_candidate(a, b);
    track.frames[t].probability = 1.0;
  }
  return track;
}

// ---------------------------------------------------------------------------

Outcome scoring_formulas() {
  Outcome out;

  // candidate scoring
  const auto one = propose_candidates({det(10, 10, 0.8), det(50, 10, 0.6)}, ProposalConfig{});
  out.require(one.size() == 1 && nearly(one[0].score, 0.7), "pair score");
  out.require(propose_candidates({det(10, 10, .5), det(50, 10, .5), det(10, 50, .5),
                                  det(50, 50, .5)},
                                 ProposalConfig{})
                      .size() == 6,
              "pair enumeration");
  ProposalConfig gated;
  gated.min_pair_distance = 10.0;
  out.require(propose_candidates({det(10, 10, .5), det(12, 10, .5), det(50, 10, .5)}, gated)
                      .size() == 2,
              "distance gate");

  // box IoU
  BoundingBox a;
  a.center = {0, 0};
  a.width = a.height = 10;
  BoundingBox far = a;
  far.center = {100, 100};
  BoundingBox shifted = a;
  shifted.center = {5, 0};
  out.require(nearly(iou(a, a), 1.0), "iou identity");
  out.require(iou(a, far) == 0.0, "iou disjoint");
  out.require(nearly(iou(a, shifted), 1.0 / 3.0), "iou one-third");

  // angle-length similarity
  out.require(nearly(angle_length_similarity({5, 0}, {5, 0}), 1.0), "similarity identical");
  out.require(angle_length_similarity({1, 0}, {0, 1}) == 0.0, "similarity orthogonal");
  out.require(angle_length_similarity({3, 0}, {1, 0}) == 0.0, "similarity length clamp");

  // edge weights
  const StentCandidate c1 = make_candidate(det(0, 0, 1.0), det(5, 0, 1.0));
  LandmarkDetection n1 = det(0, 0, 1.0, 1), n2 = det(5, 0, 1.0, 1);
  const StentCandidate c2 = make_candidate(n1, n2);
  out.require(nearly(edge_weight(c1, c2, 0.5, 0.5), 1.0), "edge weight identical");
  LandmarkDetection f1 = det(100, 100, 1.0, 1), f2 = det(100, 105, 1.0, 1);
  out.require(edge_weight(c1, make_candidate(f1, f2), 0.5, 0.5) == 0.0, "edge weight disjoint");
  const StentCandidate d1 = make_candidate(det(0, 0, 0.8), det(10, 0, 0.8));
  LandmarkDetection e1 = det(5, 0, 0.6, 1), e2 = det(15, 0, 0.6, 1);
  out.require(nearly(edge_weight(d1, make_candidate(e1, e2), 0.5, 0.5), 0.7 * (0.5 / 3.0 + 0.5)),
              "edge weight composed");

  // asymmetric heatmap loss
  Heatmap gt, pred;
  gt.width = pred.width = 10;
  gt.height = pred.height = 10;
  gt.values.assign(100, 0.0);
  pred.values.assign(100, 0.0);
  out.require(heatmap_loss(pred, gt, 1, 2) == 0.0, "loss zero");
  gt.values[3] = 1.0;
  out.require(nearly(heatmap_loss(pred, gt, 1, 2), 3.0 / 100.0), "loss under-prediction");
  gt.values[3] = 0.0;
  pred.values[3] = 1.0;
  out.require(nearly(heatmap_loss(pred, gt, 1, 2), 1.0 / 100.0), "loss over-prediction");
  return out;
}

Outcome gcn_dense_oracle() {
  Outcome out;
  double worst_wgcl = 0.0, worst_ecl = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const StentGraph g = random_graph(seed, 6);
    if (g.nodes.empty()) continue;
    rng::Stream s(seed + 5000);
    Mat theta(4, 6);
    for (double& v : theta.a) v = s.uniform(-1, 1);
    Vec bias(4);
    for (double& v : bias) v = s.uniform(-0.5, 0.5);
    const auto fast = wgcl_forward(g, theta, bias);
    const auto dense = dense_wgcl(g, theta, bias);
    for (std::size_t i = 0; i < fast.size(); ++i)
      for (std::size_t r = 0; r < fast[i].size(); ++r)
        worst_wgcl = std::max(worst_wgcl, std::abs(fast[i][r] - dense[i][r]));

    std::vector<Vec> x(g.nodes.size(), Vec(6));
    for (Vec& v : x)
      for (double& e : v) e = s.uniform(-1, 1);
    Mat w(3, 12);
    for (double& v : w.a) v = s.uniform(-1, 1);
    Vec b(3);
    for (double& v : b) v = s.uniform(-0.5, 0.5);
    const auto fast_ecl = ecl_forward(neighbor_lists(g), x, w, b);
    const auto slow_ecl = brute_ecl(g, x, w, b);
    for (std::size_t i = 0; i < fast_ecl.size(); ++i)
      for (std::size_t r = 0; r < fast_ecl[i].size(); ++r)
        worst_ecl = std::max(worst_ecl, std::abs(fast_ecl[i][r] - slow_ecl[i][r]));
  }
  std::ostringstream os;
  os << "max |sparse - dense| wgcl " << worst_wgcl << ", ecl " << worst_ecl;
  out.detail = os.str();
  out.require(worst_wgcl < 1e-10, "wgcl dense oracle");
  out.require(worst_ecl < 1e-10, "ecl brute-force oracle");
  return out;
}

Outcome gradient_check_combined() {
  Outcome out;
  constexpr double kAlpha = 1.0, kBeta = 2.0;
  constexpr std::array<double, 2> kWeights = {1.0, 5.0};
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const StentGraph g = random_graph(seed + 300, 6);
    if (g.nodes.empty()) continue;
    GcnDims dims;
    dims.input = 6;
    dims.h1 = 4;
    dims.h2 = 3;
    dims.h3 = 2;
    GcnParams gcn = init_gcn_params(dims, seed + 1);
    MlpParams mlp = init_mlp_params(6, 5, seed + 2);
    mlp.class_weights = kWeights;

    std::vector<int> labels(g.nodes.size());
    rng::Stream s(seed + 900);
    for (int& y : labels) y = static_cast<int>(s.below(2));

    LabeledFeatures feats;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      feats.features.push_back(g.nodes[i].feature);
      feats.labels.push_back(labels[i]);
    }
    std::vector<std::size_t> batch(feats.features.size());
    for (std::size_t i = 0; i < batch.size(); ++i) batch[i] = i;

    // combined objective: beta * node loss + alpha * object loss; the two
    // parameter sets are disjoint, so the full gradient is the scaled
    // concatenation of the two analytic gradients.
    auto combined = [&]() {
      const double node = gcn_loss_and_grads(g, gcn, labels, kWeights, nullptr);
      const double obj = mlp_loss_and_grads(mlp, feats, batch, nullptr);
      return kBeta * node + kAlpha * obj;
    };

    GcnGrads ggrads;
    gcn_loss_and_grads(g, gcn, labels, kWeights, &ggrads);
    MlpGrads mgrads;
    mlp_loss_and_grads(mlp, feats, batch, &mgrads);

    std::vector<std::pair<double*, double>> coords;
    auto add_block = [&](std::vector<double>& params, const std::vector<double>& grads,
                         double scale) {
      for (std::size_t i = 0; i < params.size(); ++i)
        coords.emplace_back(&params[i], scale * grads[i]);
    };
    add_block(gcn.wgcl_w.a, ggrads.wgcl_w.a, kBeta);
    add_block(gcn.wgcl_b, ggrads.wgcl_b, kBeta);
    add_block(gcn.ecl1_w.a, ggrads.ecl1_w.a, kBeta);
    add_block(gcn.ecl1_b, ggrads.ecl1_b, kBeta);
    add_block(gcn.ecl2_w.a, ggrads.ecl2_w.a, kBeta);
    add_block(gcn.ecl2_b, ggrads.ecl2_b, kBeta);
    add_block(gcn.fc_w.a, ggrads.fc_w.a, kBeta);
    add_block(gcn.fc_b, ggrads.fc_b, kBeta);
    add_block(gcn.head_w, ggrads.head_w, kBeta);
    coords.emplace_back(&gcn.head_b, kBeta * ggrads.head_b);
    add_block(mlp.w1.a, mgrads.w1.a, kAlpha);
    add_block(mlp.b1, mgrads.b1, kAlpha);
    add_block(mlp.w2.a, mgrads.w2.a, kAlpha);
    add_block(mlp.b2, mgrads.b2, kAlpha);

    for (const auto& [coord, analytic] : coords) {
      const double saved = *coord;
      const double h = 1e-6 * std::max(1.0, std::abs(saved));
      *coord = saved + h;
      const double up = combined();
      *coord = saved - h;
      const double dn = combined();
      *coord = saved;
      const double numeric = (up - dn) / (2.0 * h);
      worst = std::max(worst, std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic)));
    }
  }
  std::ostringstream os;
  os << "max relative error " << worst << " over 5 initializations";
  out.detail = os.str();
  out.require(worst < 1e-4, "gradient mismatch");
  return out;
}

Outcome viterbi_optimality() {
  Outcome out;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    rng::Stream s(seed, 0xACC1u);
    StentGraph g;
    const int frames = 1 + static_cast<int>(s.below(4));
    g.num_frames = frames;
    std::vector<std::vector<int>> ids(static_cast<std::size_t>(frames));
    for (int t = 0; t < frames; ++t) {
      const int count = 1 + static_cast<int>(s.below(4));
      for (int k = 0; k < count; ++k) {
        GraphNode n;
        n.frame = t;
        LandmarkDetection a = det(s.uniform(0, 50), s.uniform(0, 50), 0.5, t);
        LandmarkDetection b = det(s.uniform(60, 100), s.uniform(60, 100), 0.5, t);
        n.candidate = make_candidate(a, b);
        n.feature.values = {0.0};
        ids[static_cast<std::size_t>(t)].push_back(static_cast<int>(g.nodes.size()));
        g.nodes.push_back(n);
      }
    }
    for (int t = 0; t + 1 < frames; ++t)
      for (int a : ids[static_cast<std::size_t>(t)])
        for (int b : ids[static_cast<std::size_t>(t + 1)]) g.edges.push_back({a, b, s.uniform01()});
    std::vector<double> scores(g.nodes.size());
    for (double& v : scores) v = s.uniform01();

    const ViterbiResult res = viterbi_decode(g, scores, frames);
    if (res.objective != best_path_objective(g, scores, frames)) {
      out.require(false, "objective mismatch at seed " + std::to_string(seed));
      return out;
    }
    ++checked;
  }
  out.detail = std::to_string(checked) + " random trellises match exhaustive search exactly";
  return out;
}

// Models trained once on the standard corpus; shared by the ablation and
// perfect-information criteria.
const Models& standard_models() {
  static const Models models = [] {
    AblationConfig cfg = standard_ablation_config();
    return train_models(make_corpus(cfg.train_corpus, 4), cfg.train).models;
  }();
  return models;
}

Outcome ablation_direction() {
  Outcome out;
  AblationConfig cfg = standard_ablation_config();
  cfg.jobs = 4;
  const AblationReport report = run_ablation(cfg, standard_models());
  const AblationRow* det_row = report.find("detection_only");
  const AblationRow* cls_row = report.find("detection_classifier");
  const AblationRow* full_row = report.find("full_pipeline");
  out.require(det_row && cls_row && full_row, "missing rows");
  if (!out.pass) return out;
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << "precision det " << det_row->det.precision << " full "
     << full_row->det.precision << "; F1 det " << det_row->det.f1 << " cls " << cls_row->det.f1
     << " full " << full_row->det.f1;
  out.detail = os.str();
  out.require(det_row->det.precision >= 0.4 && det_row->det.precision <= 0.7,
              "detection-only precision outside [0.4, 0.7]");
  out.require(full_row->det.precision >= det_row->det.precision + 0.10,
              "full precision lead under 0.10");
  out.require(full_row->det.f1 > det_row->det.f1, "full F1 not above detection-only");
  out.require(full_row->det.f1 > cls_row->det.f1, "full F1 not above detection+classifier");
  return out;
}

Outcome perfect_information() {
  Outcome out;
  // Noiseless sequences tracked with the standard-corpus models through the
  // full image pipeline. Geometry stays inside the training envelope; the
  // stricter detector cut drops mesh-texture responses, which only matter
  // as extra negatives in noisy worlds.
  const AblationConfig std_cfg = standard_ablation_config();
  CorpusConfig eval_corpus;
  eval_corpus.base = std_cfg.eval_corpus.base;
  eval_corpus.base.noise_sigma = 0.0;
  eval_corpus.base.clutter_count = 0;
  eval_corpus.base.fp_rate = 0.0;
  eval_corpus.base.jitter_sigma = 0.0;
  eval_corpus.base.miss_probability = 0.0;
  eval_corpus.base.marker_depth = 80.0;
  eval_corpus.base.stent_contrast = 25.0;
  eval_corpus.length_min = 50.0;
  eval_corpus.length_max = 70.0;
  eval_corpus.angle_min = -0.9;
  eval_corpus.angle_max = 0.9;
  eval_corpus.count = 6;
  eval_corpus.seed = 4242;

  PipelineConfig pipeline = std_cfg.pipeline;
  pipeline.detector.threshold = 0.7;

  MatchResult combined;
  for (const TrainingSequence& ts : make_corpus(eval_corpus)) {
    const Track track = track_sequence(ts.seq, pipeline, standard_models());
    const MatchResult m = match_predictions(track, ts.gt, 5.0);
    combined.frames.insert(combined.frames.end(), m.frames.begin(), m.frames.end());
  }
  const DetectionMetrics det_m = detection_metrics(combined);
  const LocalizationMetrics loc = localization_metrics(combined);
  std::ostringstream os;
  os.precision(4);
  os << "F1 " << det_m.f1 << ", MAE " << (loc.defined ? loc.mae : -1.0) << " px over "
     << loc.count << " landmarks";
  out.detail = os.str();
  out.require(det_m.f1 == 1.0, "F1 not 1.0");
  out.require(loc.defined && loc.mae < 0.5, "MAE not below 0.5 px");
  return out;
}

double region_stddev(const GrayFrame& f, int x0, int y0, int x1, int y1) {
  double sum = 0.0, count = 0.0;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) {
      sum += f.at(x, y);
      count += 1.0;
    }
  const double mean = sum / count;
  double var = 0.0;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) var += (f.at(x, y) - mean) * (f.at(x, y) - mean);
  return std::sqrt(var / count);
}

double dip_contrast(const GrayFrame& f, Point2 p) {
  double center = 0.0;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) center += bilinear_sample(f, p.x + dx, p.y + dy);
  center /= 9.0;
  std::vector<double> ring;
  for (int k = 0; k < 64; ++k) {
    const double a = 2.0 * kPi * k / 64.0;
    ring.push_back(bilinear_sample(f, p.x + 9.0 * std::cos(a), p.y + 9.0 * std::sin(a)));
  }
  std::nth_element(ring.begin(), ring.begin() + 32, ring.end());
  return ring[32] - center;
}

Outcome enhancement() {
  Outcome out;

  // static scene: flat-region noise drops by sqrt(7)
  SimConfig still;
  still.frames = 7;
  still.width = still.height = 192;
  still.cardiac_amplitude = 0.0;
  still.respiratory_amplitude = 0.0;
  still.noise_sigma = 8.0;
  still.seed = 23;
  {
    auto [seq, gt] = simulate_sequence(still);
    const EnhanceResult r = enhance(seq, truth_track(gt), 7, 3);
    const double after = region_stddev(r.image, 8, 8, 40, 40);
    const double target = 8.0 / std::sqrt(7.0);
    std::ostringstream os;
    os.precision(3);
    os << "flat noise std " << after << " (target " << target << ")";
    out.detail = os.str();
    out.require(std::abs(after - target) <= 0.2 * target, "noise reduction off by over 20%");
  }

  // moving stent: the aligned marker gains contrast against noise in every
  // input frame; a static blob loses plain contrast in every input frame
  SimConfig moving;
  moving.frames = 9;
  moving.width = moving.height = 192;
  moving.cardiac_amplitude = 7.0;
  moving.cardiac_frequency = 0.13;
  moving.respiratory_amplitude = 3.0;
  moving.respiratory_frequency = 0.031;
  moving.noise_sigma = 7.0;
  moving.stent_length = 60.0;
  moving.stent_angle = 0.3;
  moving.seed = 29;
  auto [seq, gt] = simulate_sequence(moving);
  const Point2 blob{40.0, 140.0};
  for (GrayFrame& f : seq.frames) {
    for (int y = 0; y < f.height; ++y)
      for (int x = 0; x < f.width; ++x) {
        const double d2 = (x - blob.x) * (x - blob.x) + (y - blob.y) * (y - blob.y);
        const double v = f.at(x, y) - 70.0 * std::exp(-d2 / 8.0);
        f.pixels[static_cast<std::size_t>(y) * f.width + x] =
            static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      }
  }
  const int ref = 4;
  const EnhanceResult r = enhance(seq, truth_track(gt), 7, ref);
  out.require(r.frames_used == 7, "expected 7 frames");

  const double cnr_after =
      dip_contrast(r.image, gt.frames[ref].m1) / region_stddev(r.image, 130, 20, 170, 50);
  const double blob_after = dip_contrast(r.image, blob);
  for (int t = ref - 3; t <= ref + 3; ++t) {
    const GrayFrame& f = seq.frames[static_cast<std::size_t>(t)];
    const double cnr_before = dip_contrast(f, gt.frames[static_cast<std::size_t>(t)].m1) /
                              region_stddev(f, 130, 20, 170, 50);
    out.require(cnr_after > cnr_before,
                "marker contrast-to-noise not above frame " + std::to_string(t));
    out.require(blob_after < dip_contrast(f, blob),
                "moving clutter not suppressed vs frame " + std::to_string(t));
  }
  return out;
}

Outcome metric_formulas() {
  Outcome out;
  MatchResult m;
  m.frames.resize(1);
  m.frames[0].tp = 9;
  m.frames[0].fp = 1;
  m.frames[0].fn = 1;
  const DetectionMetrics d = detection_metrics(m);
  out.require(nearly(d.precision, 0.9), "precision");
  out.require(nearly(d.recall, 0.9), "recall");
  out.require(nearly(d.f1, 0.9), "f1");
  out.require(nearly(d.accuracy, 9.0 / 11.0), "accuracy");

  rng::Stream s(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    MatchResult r;
    r.frames.resize(1);
    const int count = 1 + static_cast<int>(s.below(16));
    for (int i = 0; i < count; ++i)
      r.frames[0].matched_distances.push_back(s.uniform(0.0, 12.0));
    const LocalizationMetrics loc = localization_metrics(r);
    if (loc.rmse < loc.mae - 1e-12) {
      out.require(false, "rmse below mae at trial " + std::to_string(trial));
      return out;
    }
  }
  out.detail = "hand cases exact; rmse >= mae over 1000 random match sets";
  return out;
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  return io::read_text_file(a.string()) == io::read_text_file(b.string());
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& which) {
  std::vector<fs::path> rel;
  for (const auto& entry : fs::recursive_directory_iterator(a))
    if (entry.is_regular_file()) rel.push_back(fs::relative(entry.path(), a));
  std::sort(rel.begin(), rel.end());
  for (const fs::path& p : rel) {
    if (p.filename() == "manifest.json") continue;  // carries wall-clock duration
    if (!fs::exists(b / p) || !same_bytes(a / p, b / p)) {
      which = p.string();
      return false;
    }
  }
  return true;
}

Outcome determinism(const std::string& cli) {
  Outcome out;
  const fs::path root = fs::temp_directory_path() / "stent_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);

  auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };
  const std::string sim_args =
      "--count 3 --seed 5 --set frames=8 --set noise_sigma=8 --set clutter_count=3 "
      "--set fp_rate=3 --set jitter_sigma=0.5 --set miss_probability=0.05";
  const std::string train_args =
      "--set mlp.epochs=20 --set gcn.epochs=30 --set gcn.learning_rate=0.2 "
      "--set gcn.batch_clips=2";

  std::string diff;
  for (const char* tag : {"a", "b"}) {
    const fs::path dir = root / tag;
    out.require(run("simulate --out " + (dir / "sim").string() + " " + sim_args),
                std::string("simulate run ") + tag + " failed");
    out.require(run("train --data " + (dir / "sim").string() + " --out " +
                    (dir / "model").string() + " " + train_args),
                std::string("train run ") + tag + " failed");
    out.require(run("track --frames " + (dir / "sim/seq_000/frames").string() + " --mlp " +
                    (dir / "model/mlp.txt").string() + " --gcn " +
                    (dir / "model/gcn.txt").string() + " --out " + (dir / "track").string()),
                std::string("track run ") + tag + " failed");
    if (!out.pass) return out;
  }
  out.require(same_tree(root / "a" / "sim", root / "b" / "sim", diff),
              "simulate outputs differ: " + diff);
  out.require(same_tree(root / "a" / "model", root / "b" / "model", diff),
              "train outputs differ: " + diff);
  out.require(same_tree(root / "a" / "track", root / "b" / "track", diff),
              "track outputs differ: " + diff);
  if (out.pass) out.detail = "simulate, train, track re-runs byte-identical";
  fs::remove_all(root);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";

  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"scoring-formulas", scoring_formulas},
      {"gcn-dense-oracle", gcn_dense_oracle},
      {"gradient-check", gradient_check_combined},
      {"viterbi-optimality", viterbi_optimality},
      {"ablation-direction", ablation_direction},
      {"perfect-information", perfect_information},
      {"enhancement", enhancement},
      {"metric-formulas", metric_formulas},
      {"determinism", [&] {
         if (cli.empty()) {
           Outcome out;
           out.require(false, "CLI path not supplied as argv[1]");
           return out;
         }
         return determinism(cli);
       }},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %-20s (%6.1fs) %s\n", outcome.pass ? "PASS" : "FAIL", criterion.name,
                seconds, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
