// Command-line front end: simulate, detect, train, track, eval, enhance,
// and a one-shot ablation comparison. Every run writes a manifest with the
// resolved configuration so it can be reproduced bit for bit.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stent/enhance.hpp"
#include "stent/eval.hpp"
#include "stent/io.hpp"
#include "stent/log.hpp"
#include "stent/pipeline.hpp"
#include "stent/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stent;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
  std::vector<std::string> overrides;  // key=value
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_config = true) {
  if (with_config) cmd->add_option("--config", args.config_path, "key=value config file");
  cmd->add_option("--out", args.out_dir, "output directory")->required();
  cmd->add_option("--seed", args.seed, "override the config seed")->each([&](const std::string&) {
    args.seed_set = true;
  });
  cmd->add_option("--jobs", args.jobs, "worker threads over sequences");
  cmd->add_option("--set", args.overrides, "override a config key (repeatable)");
}

std::pair<std::string, std::string> split_override(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
  return {kv.substr(0, eq), kv.substr(eq + 1)};
}

// Flat key=value views of the tool configs, mainly for --set and manifests.
struct KvConfig {
  TrainConfig train;
  PipelineConfig pipeline;
  double eval_radius = 5.0;
  int enhance_frames = 7;
  int enhance_reference = -1;  // -1 picks the middle tracked frame
  std::string detections_mode = "simulated";  // simulated | tophat | <path>

  void set(const std::string& key, const std::string& value) {
    auto d = [&] { return std::stod(value); };
    auto i = [&] { return std::stoi(value); };
    if (key == "proposal.min_pair_distance") train.proposal.min_pair_distance = d();
    else if (key == "proposal.max_pair_distance") train.proposal.max_pair_distance = d();
    else if (key == "proposal.grid_length_bins") train.proposal.grid_length_bins = i();
    else if (key == "proposal.grid_width_bins") train.proposal.grid_width_bins = i();
    else if (key == "proposal.score_floor") train.proposal.score_floor = d();
    else if (key == "detector.tophat_radius") train.detector.tophat_radius = i();
    else if (key == "detector.threshold") train.detector.threshold = d();
    else if (key == "detector.nms_radius") train.detector.nms_radius = d();
    else if (key == "detector.heatmap_sigma") train.detector.heatmap_sigma = d();
    else if (key == "detector.max_detections") train.detector.max_detections = i();
    else if (key == "mlp.hidden_dim") train.mlp.hidden_dim = i();
    else if (key == "mlp.epochs") train.mlp.epochs = i();
    else if (key == "mlp.batch_size") train.mlp.batch_size = i();
    else if (key == "mlp.learning_rate") train.mlp.learning_rate = d();
    else if (key == "mlp.class_weight_neg") train.mlp.class_weights[0] = d();
    else if (key == "mlp.class_weight_pos") train.mlp.class_weights[1] = d();
    else if (key == "mlp.seed") train.mlp.seed = std::stoull(value);
    else if (key == "gcn.h1") train.gcn.dims.h1 = i();
    else if (key == "gcn.h2") train.gcn.dims.h2 = i();
    else if (key == "gcn.h3") train.gcn.dims.h3 = i();
    else if (key == "gcn.epochs") train.gcn.epochs = i();
    else if (key == "gcn.learning_rate") train.gcn.learning_rate = d();
    else if (key == "gcn.class_weight_neg") train.gcn.class_weights[0] = d();
    else if (key == "gcn.class_weight_pos") train.gcn.class_weights[1] = d();
    else if (key == "gcn.beta") train.gcn.beta = d();
    else if (key == "gcn.batch_clips") train.gcn.batch_clips = i();
    else if (key == "gcn.seed") train.gcn.seed = std::stoull(value);
    else if (key == "alpha1") { train.alpha1 = d(); pipeline.alpha1 = train.alpha1; }
    else if (key == "alpha2") { train.alpha2 = d(); pipeline.alpha2 = train.alpha2; }
    else if (key == "match_radius") { train.match_radius = d(); eval_radius = train.match_radius; }
    else if (key == "clip_length") { train.clip_length = i(); pipeline.clip_length = train.clip_length; }
    else if (key == "clip_stride") { train.clip_stride = i(); pipeline.clip_stride = train.clip_stride; }
    else if (key == "selection_threshold") pipeline.selection_threshold = d();
    else if (key == "selection_mode") {
      if (value == "threshold-argmax") pipeline.selection_mode = SelectionMode::kThresholdArgmax;
      else if (value == "top2-markers") pipeline.selection_mode = SelectionMode::kTopTwoMarkers;
      else throw std::invalid_argument("selection_mode must be threshold-argmax or top2-markers");
    }
    else if (key == "correction_window") pipeline.correction_window = i();
    else if (key == "correction_passes") pipeline.correction_passes = i();
    else if (key == "eval_radius") eval_radius = d();
    else if (key == "enhance_frames") enhance_frames = i();
    else if (key == "enhance_reference") enhance_reference = i();
    else if (key == "detections") detections_mode = value;
    else throw std::invalid_argument("unknown config key '" + key + "'");
    pipeline.proposal = train.proposal;
    pipeline.detector = train.detector;
  }

  json to_json() const {
    json j;
    j["proposal.min_pair_distance"] = train.proposal.min_pair_distance;
    j["proposal.max_pair_distance"] = train.proposal.max_pair_distance;
    j["proposal.grid_length_bins"] = train.proposal.grid_length_bins;
    j["proposal.grid_width_bins"] = train.proposal.grid_width_bins;
    j["proposal.score_floor"] = train.proposal.score_floor;
    j["detector.tophat_radius"] = train.detector.tophat_radius;
    j["detector.threshold"] = train.detector.threshold;
    j["detector.nms_radius"] = train.detector.nms_radius;
    j["detector.heatmap_sigma"] = train.detector.heatmap_sigma;
    j["detector.max_detections"] = train.detector.max_detections;
    j["mlp.hidden_dim"] = train.mlp.hidden_dim;
    j["mlp.epochs"] = train.mlp.epochs;
    j["mlp.batch_size"] = train.mlp.batch_size;
    j["mlp.learning_rate"] = train.mlp.learning_rate;
    j["mlp.class_weight_neg"] = train.mlp.class_weights[0];
    j["mlp.class_weight_pos"] = train.mlp.class_weights[1];
    j["mlp.seed"] = train.mlp.seed;
    j["gcn.h1"] = train.gcn.dims.h1;
    j["gcn.h2"] = train.gcn.dims.h2;
    j["gcn.h3"] = train.gcn.dims.h3;
    j["gcn.epochs"] = train.gcn.epochs;
    j["gcn.learning_rate"] = train.gcn.learning_rate;
    j["gcn.class_weight_neg"] = train.gcn.class_weights[0];
    j["gcn.class_weight_pos"] = train.gcn.class_weights[1];
    j["gcn.beta"] = train.gcn.beta;
    j["gcn.batch_clips"] = train.gcn.batch_clips;
    j["gcn.seed"] = train.gcn.seed;
    j["alpha1"] = train.alpha1;
    j["alpha2"] = train.alpha2;
    j["match_radius"] = train.match_radius;
    j["clip_length"] = train.clip_length;
    j["clip_stride"] = train.clip_stride;
    j["selection_threshold"] = pipeline.selection_threshold;
    j["selection_mode"] = pipeline.selection_mode == SelectionMode::kThresholdArgmax
                              ? "threshold-argmax"
                              : "top2-markers";
    j["correction_window"] = pipeline.correction_window;
    j["correction_passes"] = pipeline.correction_passes;
    j["eval_radius"] = eval_radius;
    j["enhance_frames"] = enhance_frames;
    j["enhance_reference"] = enhance_reference;
    j["detections"] = detections_mode;
    return j;
  }
};

struct ManifestTimer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void write_manifest(const std::string& out_dir, const std::string& command, const json& config,
                    const json& inputs, const json& outputs, double duration) {
  json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["config"] = config;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["duration_seconds"] = duration;
  io::write_text_file((fs::path(out_dir) / "manifest.json").string(), j.dump(2) + "\n");
}

// A sequence directory holds frames/, gt.jsonl and optionally
// detections.jsonl. A corpus directory holds seq_000/, seq_001/, ...
std::vector<std::string> sequence_dirs(const std::string& data_dir) {
  if (fs::exists(fs::path(data_dir) / "gt.jsonl")) return {data_dir};
  std::vector<std::string> dirs;
  for (const auto& entry : fs::directory_iterator(data_dir))
    if (entry.is_directory() && fs::exists(entry.path() / "gt.jsonl"))
      dirs.push_back(entry.path().string());
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw std::runtime_error("no sequences found under " + data_dir);
  return dirs;
}

TrainingSequence load_sequence_dir(const std::string& dir, const std::string& detections_mode,
                                   const DetectorParams& detector) {
  TrainingSequence ts;
  ts.seq = io::read_frames((fs::path(dir) / "frames").string());
  ts.gt = io::read_ground_truth((fs::path(dir) / "gt.jsonl").string());
  ts.seq.truth = ts.gt;
  if (detections_mode == "simulated") {
    ts.detections = io::read_detections((fs::path(dir) / "detections.jsonl").string(),
                                        static_cast<int>(ts.seq.frames.size()));
  } else if (detections_mode == "tophat") {
    // leave empty; the trainer runs the detector
  } else {
    ts.detections = io::read_detections(detections_mode, static_cast<int>(ts.seq.frames.size()));
  }
  (void)detector;
  return ts;
}

int cmd_simulate(const CommonArgs& args, int count) {
  ManifestTimer timer;
  SimConfig cfg;
  if (!args.config_path.empty()) cfg = parse_sim_config(io::read_text_file(args.config_path));
  for (const std::string& kv : args.overrides) {
    const auto [k, v] = split_override(kv);
    apply_config_override(cfg, k, v);
  }
  if (args.seed_set) cfg.seed = args.seed;
  cfg.validate();

  fs::create_directories(args.out_dir);
  json outputs = json::array();
  auto write_one = [&](const SimConfig& c, const std::string& dir) {
    fs::create_directories(dir);
    auto [seq, gt] = simulate_sequence(c);
    io::write_frames((fs::path(dir) / "frames").string(), seq);
    io::write_ground_truth((fs::path(dir) / "gt.jsonl").string(), gt);
    io::write_detections((fs::path(dir) / "detections.jsonl").string(),
                         simulate_detections(gt, c));
    io::write_text_file((fs::path(dir) / "config.txt").string(), format_sim_config(c));
    outputs.push_back(dir);
  };

  if (count <= 1) {
    write_one(cfg, args.out_dir);
  } else {
    for (int i = 0; i < count; ++i) {
      SimConfig c = cfg;
      c.seed = rng::mix(cfg.seed + static_cast<std::uint64_t>(i) + 1);
      char name[16];
      std::snprintf(name, sizeof(name), "seq_%03d", i);
      write_one(c, (fs::path(args.out_dir) / name).string());
    }
  }

  json config;
  for (const auto& [k, v] : sim_config_kv(cfg)) config[k] = v;
  config["count"] = count;
  write_manifest(args.out_dir, "simulate", config, json::object(), outputs, timer.seconds());
  return 0;
}

int cmd_detect(const CommonArgs& args, const std::string& frames_dir) {
  ManifestTimer timer;
  KvConfig kv;
  for (const std::string& ov : args.overrides) {
    const auto [k, v] = split_override(ov);
    kv.set(k, v);
  }
  const Sequence seq = io::read_frames(frames_dir);
  std::vector<std::vector<LandmarkDetection>> dets(seq.frames.size());
  parallel_for(static_cast<int>(seq.frames.size()), args.jobs, [&](int t) {
    dets[static_cast<std::size_t>(t)] =
        tophat_detect(seq.frames[static_cast<std::size_t>(t)], kv.train.detector, t);
  });
  fs::create_directories(args.out_dir);
  const std::string out_path = (fs::path(args.out_dir) / "detections.jsonl").string();
  io::write_detections(out_path, dets);
  write_manifest(args.out_dir, "detect", kv.to_json(), json{{"frames", frames_dir}},
                 json::array({out_path}), timer.seconds());
  return 0;
}

int cmd_train(const CommonArgs& args, const std::string& data_dir) {
  ManifestTimer timer;
  KvConfig kv;
  for (const std::string& ov : args.overrides) {
    const auto [k, v] = split_override(ov);
    kv.set(k, v);
  }
  if (args.seed_set) {
    kv.train.mlp.seed = args.seed;
    kv.train.gcn.seed = args.seed;
  }
  kv.train.use_simulated_detections = kv.detections_mode == "simulated";

  std::vector<TrainingSequence> data;
  for (const std::string& dir : sequence_dirs(data_dir))
    data.push_back(load_sequence_dir(dir, kv.detections_mode, kv.train.detector));

  const TrainOutput out = train_models(data, kv.train);

  fs::create_directories(args.out_dir);
  const std::string mlp_path = (fs::path(args.out_dir) / "mlp.txt").string();
  const std::string gcn_path = (fs::path(args.out_dir) / "gcn.txt").string();
  const std::string trace_path = (fs::path(args.out_dir) / "train_loss.csv").string();
  io::save_mlp(mlp_path, out.models.mlp);
  io::save_gcn(gcn_path, out.models.gcn);
  {
    std::ostringstream os;
    os.precision(17);
    os << "epoch,mlp_loss,gcn_loss\n";
    const std::size_t rows = std::max(out.mlp_loss.size(), out.gcn_loss.size());
    for (std::size_t e = 0; e < rows; ++e) {
      os << e << ",";
      if (e < out.mlp_loss.size()) os << out.mlp_loss[e];
      os << ",";
      if (e < out.gcn_loss.size()) os << out.gcn_loss[e];
      os << "\n";
    }
    io::write_text_file(trace_path, os.str());
  }
  write_manifest(args.out_dir, "train", kv.to_json(), json{{"data", data_dir}},
                 json::array({mlp_path, gcn_path, trace_path}), timer.seconds());
  return 0;
}

int cmd_track(const CommonArgs& args, const std::string& frames_dir, const std::string& mlp_path,
              const std::string& gcn_path) {
  ManifestTimer timer;
  KvConfig kv;
  for (const std::string& ov : args.overrides) {
    const auto [k, v] = split_override(ov);
    kv.set(k, v);
  }
  Sequence seq = io::read_frames(frames_dir);
  Models models;
  models.gcn = io::load_gcn(gcn_path);
  if (!mlp_path.empty()) models.mlp = io::load_mlp(mlp_path);

  Track track;
  if (kv.detections_mode == "tophat") {
    track = track_sequence(seq, kv.pipeline, models);
  } else {
    std::string det_path = kv.detections_mode == "simulated"
                               ? (fs::path(frames_dir).parent_path() / "detections.jsonl").string()
                               : kv.detections_mode;
    const auto dets = io::read_detections(det_path, static_cast<int>(seq.frames.size()));
    track = track_sequence(seq, dets, kv.pipeline, models);
  }

  fs::create_directories(args.out_dir);
  const std::string track_path = (fs::path(args.out_dir) / "track.jsonl").string();
  io::write_track(track_path, track);
  write_manifest(args.out_dir, "track", kv.to_json(),
                 json{{"frames", frames_dir}, {"mlp", mlp_path}, {"gcn", gcn_path}},
                 json::array({track_path}), timer.seconds());
  return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& track_path, const std::string& gt_path) {
  ManifestTimer timer;
  KvConfig kv;
  for (const std::string& ov : args.overrides) {
    const auto [k, v] = split_override(ov);
    kv.set(k, v);
  }
  const Track track = io::read_track(track_path);
  const GroundTruth gt = io::read_ground_truth(gt_path);
  const MatchResult match = match_predictions(track, gt, kv.eval_radius);
  const DetectionMetrics det = detection_metrics(match);
  const LocalizationMetrics loc = localization_metrics(match);

  std::ostringstream text;
  text.precision(12);
  text << "tp=" << match.tp() << "\nfp=" << match.fp() << "\nfn=" << match.fn()
       << "\ntn=" << match.tn() << "\nprecision=" << det.precision << "\nrecall=" << det.recall
       << "\nf1=" << det.f1 << "\naccuracy=" << det.accuracy
       << "\nmatched_landmarks=" << loc.count;
  if (loc.defined) text << "\nmae_px=" << loc.mae << "\nrmse_px=" << loc.rmse;
  else text << "\nmae_px=undefined\nrmse_px=undefined";
  text << "\ntn_unit=frame\n";

  json jm;
  jm["tp"] = match.tp();
  jm["fp"] = match.fp();
  jm["fn"] = match.fn();
  jm["tn"] = match.tn();
  jm["precision"] = det.precision;
  jm["recall"] = det.recall;
  jm["f1"] = det.f1;
  jm["accuracy"] = det.accuracy;
  jm["matched_landmarks"] = loc.count;
  if (loc.defined) {
    jm["mae_px"] = loc.mae;
    jm["rmse_px"] = loc.rmse;
  }
  jm["tn_unit"] = "frame";

  fs::create_directories(args.out_dir);
  const std::string txt_path = (fs::path(args.out_dir) / "metrics.txt").string();
  const std::string json_path = (fs::path(args.out_dir) / "metrics.json").string();
  io::write_text_file(txt_path, text.str());
  io::write_text_file(json_path, jm.dump(2) + "\n");
  std::fputs(text.str().c_str(), stdout);
  write_manifest(args.out_dir, "eval", kv.to_json(), json{{"track", track_path}, {"gt", gt_path}},
                 json::array({txt_path, json_path}), timer.seconds());
  return 0;
}

int cmd_enhance(const CommonArgs& args, const std::string& frames_dir,
                const std::string& track_path) {
  ManifestTimer timer;
  KvConfig kv;
  for (const std::string& ov : args.overrides) {
    const auto [k, v] = split_override(ov);
    kv.set(k, v);
  }
  const Sequence seq = io::read_frames(frames_dir);
  Track track = io::read_track(track_path);
  track.frames.resize(seq.frames.size());

  int reference = kv.enhance_reference;
  if (reference < 0) {
    // middle tracked frame
    std::vector<int> tracked;
    for (std::size_t t = 0; t < track.frames.size(); ++t)
      if (track.frames[t].present) tracked.push_back(static_cast<int>(t));
    if (tracked.empty()) throw std::runtime_error("enhance: track has no selections");
    reference = tracked[tracked.size() / 2];
  }
  const EnhanceResult result = enhance(seq, track, kv.enhance_frames, reference);

  fs::create_directories(args.out_dir);
  const std::string out_path = (fs::path(args.out_dir) / "enhanced.pgm").string();
  io::write_pgm(out_path, result.image);

  // overlay with the tracked pair burned in
  GrayFrame overlay = result.image;
  const auto& cand = track.frames[static_cast<std::size_t>(reference)].candidate;
  for (const Point2& m : {cand.first.position, cand.second.position}) {
    const int cx = static_cast<int>(std::lround(m.x)), cy = static_cast<int>(std::lround(m.y));
    for (int d = -6; d <= 6; ++d) {
      if (std::abs(d) < 3) continue;
      if (cx + d >= 0 && cx + d < overlay.width && cy >= 0 && cy < overlay.height)
        overlay.pixels[static_cast<std::size_t>(cy) * overlay.width + (cx + d)] = 255;
      if (cy + d >= 0 && cy + d < overlay.height && cx >= 0 && cx < overlay.width)
        overlay.pixels[static_cast<std::size_t>(cy + d) * overlay.width + cx] = 255;
    }
  }
  const std::string overlay_path = (fs::path(args.out_dir) / "enhanced_overlay.pgm").string();
  io::write_pgm(overlay_path, overlay);

  std::printf("enhanced %d frames around frame %d -> %s\n", result.frames_used, reference,
              out_path.c_str());
  write_manifest(args.out_dir, "enhance", kv.to_json(),
                 json{{"frames", frames_dir}, {"track", track_path}},
                 json::array({out_path, overlay_path}), timer.seconds());
  return 0;
}

int cmd_ablate(const CommonArgs& args, int train_count, int eval_count) {
  ManifestTimer timer;
  AblationConfig cfg = standard_ablation_config();
  cfg.jobs = args.jobs;
  if (train_count > 0) cfg.train_corpus.count = train_count;
  if (eval_count > 0) cfg.eval_corpus.count = eval_count;
  if (args.seed_set) {
    cfg.train_corpus.seed = args.seed;
    cfg.eval_corpus.seed = rng::mix(args.seed);
  }
  KvConfig kv;
  kv.train = cfg.train;
  kv.pipeline = cfg.pipeline;
  for (const std::string& ov : args.overrides) {
    const auto [k, v] = split_override(ov);
    kv.set(k, v);
  }
  cfg.train = kv.train;
  cfg.pipeline = kv.pipeline;

  const AblationReport report = run_ablation(cfg);
  const std::string table = format_ablation_table(report);
  std::fputs(table.c_str(), stdout);

  json rows = json::array();
  for (const AblationRow& row : report.rows) {
    json r;
    r["name"] = row.name;
    r["tp"] = row.tp;
    r["fp"] = row.fp;
    r["fn"] = row.fn;
    r["tn"] = row.tn;
    r["precision"] = row.det.precision;
    r["recall"] = row.det.recall;
    r["f1"] = row.det.f1;
    r["accuracy"] = row.det.accuracy;
    if (row.loc.defined) {
      r["mae_px"] = row.loc.mae;
      r["rmse_px"] = row.loc.rmse;
    }
    rows.push_back(r);
  }
  fs::create_directories(args.out_dir);
  const std::string json_path = (fs::path(args.out_dir) / "ablation.json").string();
  const std::string table_path = (fs::path(args.out_dir) / "ablation.txt").string();
  io::write_text_file(json_path, rows.dump(2) + "\n");
  io::write_text_file(table_path, table);

  json config = kv.to_json();
  config["train_sequences"] = cfg.train_corpus.count;
  config["eval_sequences"] = cfg.eval_corpus.count;
  config["train_seed"] = cfg.train_corpus.seed;
  config["eval_seed"] = cfg.eval_corpus.seed;
  write_manifest(args.out_dir, "ablate", config, json::object(),
                 json::array({json_path, table_path}), timer.seconds());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landmark-pair stent tracking pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  CommonArgs sim_args;
  int sim_count = 1;
  CLI::App* sim = app.add_subcommand("simulate", "render a synthetic sequence corpus");
  add_common(sim, sim_args);
  sim->add_option("--count", sim_count, "number of sequences");

  CommonArgs detect_args;
  std::string detect_frames;
  CLI::App* detect = app.add_subcommand("detect", "run the top-hat detector over frames");
  add_common(detect, detect_args, false);
  detect->add_option("--frames", detect_frames, "frames directory")->required();

  CommonArgs train_args;
  std::string train_data;
  CLI::App* train = app.add_subcommand("train", "train the classifier and tracking head");
  add_common(train, train_args, false);
  train->add_option("--data", train_data, "corpus directory")->required();

  CommonArgs track_args;
  std::string track_frames, track_mlp, track_gcn;
  CLI::App* track = app.add_subcommand("track", "track a sequence with trained models");
  add_common(track, track_args, false);
  track->add_option("--frames", track_frames, "frames directory")->required();
  track->add_option("--mlp", track_mlp, "object classifier parameters");
  track->add_option("--gcn", track_gcn, "tracking head parameters")->required();

  CommonArgs eval_args;
  std::string eval_track, eval_gt;
  CLI::App* evalc = app.add_subcommand("eval", "score a track against ground truth");
  add_common(evalc, eval_args, false);
  evalc->add_option("--track", eval_track, "track.jsonl")->required();
  evalc->add_option("--gt", eval_gt, "gt.jsonl")->required();

  CommonArgs enh_args;
  std::string enh_frames, enh_track;
  CLI::App* enh = app.add_subcommand("enhance", "motion-compensated stent enhancement");
  add_common(enh, enh_args, false);
  enh->add_option("--frames", enh_frames, "frames directory")->required();
  enh->add_option("--track", enh_track, "track.jsonl")->required();

  CommonArgs abl_args;
  int abl_train = 0, abl_eval = 0;
  CLI::App* abl = app.add_subcommand("ablate", "compare baselines against the full pipeline");
  add_common(abl, abl_args, false);
  abl->add_option("--train-sequences", abl_train, "training corpus size");
  abl->add_option("--eval-sequences", abl_eval, "evaluation corpus size");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_args, sim_count);
    if (detect->parsed()) return cmd_detect(detect_args, detect_frames);
    if (train->parsed()) return cmd_train(train_args, train_data);
    if (track->parsed()) return cmd_track(track_args, track_frames, track_mlp, track_gcn);
    if (evalc->parsed()) return cmd_eval(eval_args, eval_track, eval_gt);
    if (enh->parsed()) return cmd_enhance(enh_args, enh_frames, enh_track);
    if (abl->parsed()) return cmd_ablate(abl_args, abl_train, abl_eval);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
