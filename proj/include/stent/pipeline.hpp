#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stent/eval.hpp"
#include "stent/gcn.hpp"
#include "stent/propose.hpp"
#include "stent/simulate.hpp"
#include "stent/track.hpp"

namespace stent {

// Runs fn(0..n-1) across up to jobs threads; each index owns its output
// slot, so results are independent of scheduling.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

struct TrainingSequence {
  Sequence seq;
  GroundTruth gt;
  // Pre-made detection lists; empty means run the top-hat detector.
  std::vector<std::vector<LandmarkDetection>> detections;
};

struct TrainConfig {
  ProposalConfig proposal;
  DetectorParams detector;
  bool use_simulated_detections = true;
  double match_radius = 5.0;  // candidate labeling radius, px
  double alpha1 = 0.5;
  double alpha2 = 0.5;
  MlpTrainConfig mlp;
  GcnTrainConfig gcn;
  int clip_length = 10;
  int clip_stride = 5;
};

// A candidate is positive when its two landmarks match the two true markers
// within the radius, under either assignment.
bool candidate_matches_truth(const StentCandidate& cand, const GroundTruth::Entry& truth,
                             double radius);

struct TrainOutput {
  Models models;
  std::vector<double> mlp_loss;
  std::vector<double> gcn_loss;
};

// Trains the object classifier and the tracking head on labeled proposals
// from the given sequences. Deterministic given the config seeds.
TrainOutput train_models(const std::vector<TrainingSequence>& data, const TrainConfig& cfg);

// Seeded corpus: per-sequence seeds, stent angles and lengths are derived
// from the master seed, everything else comes from the base config.
struct CorpusConfig {
  SimConfig base;
  int count = 10;
  std::uint64_t seed = 1;
  double angle_min = -1.2;
  double angle_max = 1.2;
  double length_min = 45.0;
  double length_max = 75.0;
};

std::vector<TrainingSequence> make_corpus(const CorpusConfig& cfg, int jobs = 1);

// Baselines for the pipeline comparison. Detection-only picks the highest
// mean-score pair per frame; the classifier variant picks the proposal the
// object classifier likes best, when it clears the threshold.
Track detection_only_track(const std::vector<std::vector<LandmarkDetection>>& detections,
                           const ProposalConfig& cfg);
Track classifier_track(const Sequence& seq,
                       const std::vector<std::vector<LandmarkDetection>>& detections,
                       const ProposalConfig& cfg, const MlpParams& mlp, double threshold);
// Viterbi baseline over the whole-sequence graph with mean-score nodes.
Track viterbi_baseline_track(const Sequence& seq,
                             const std::vector<std::vector<LandmarkDetection>>& detections,
                             const ProposalConfig& cfg, double alpha1, double alpha2);

struct AblationConfig {
  CorpusConfig train_corpus;
  CorpusConfig eval_corpus;
  TrainConfig train;
  PipelineConfig pipeline;
  double classifier_threshold = 0.5;
  double match_radius = 5.0;
  int jobs = 1;
};

struct AblationRow {
  std::string name;
  long tp = 0, fp = 0, fn = 0, tn = 0;
  DetectionMetrics det;
  LocalizationMetrics loc;
};

struct AblationReport {
  std::vector<AblationRow> rows;
  const AblationRow* find(const std::string& name) const;
};

AblationReport run_ablation(const AblationConfig& cfg);
// Same comparison with models trained elsewhere (or loaded from disk).
AblationReport run_ablation(const AblationConfig& cfg, const Models& models);
std::string format_ablation_table(const AblationReport& report);

// The pinned corpus and training setup used by the `ablate` command.
AblationConfig standard_ablation_config();

}  // namespace stent
