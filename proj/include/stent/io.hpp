#pragma once

#include <string>
#include <vector>

#include "stent/core.hpp"
#include "stent/propose.hpp"
#include "stent/track.hpp"

namespace stent::io {

// 8-bit binary PGM (P5).
void write_pgm(const std::string& path, const GrayFrame& frame);
GrayFrame read_pgm(const std::string& path);

// Numbered frames under dir: frame_000000.pgm, frame_000001.pgm, ...
void write_frames(const std::string& dir, const Sequence& seq);
Sequence read_frames(const std::string& dir);

// One JSON object per line:
//   {"frame":t,"markers":[[x1,y1],[x2,y2]],"present":true}
void write_ground_truth(const std::string& path, const GroundTruth& gt);
GroundTruth read_ground_truth(const std::string& path);

//   {"frame":t,"x":...,"y":...,"score":...}
void write_detections(const std::string& path,
                      const std::vector<std::vector<LandmarkDetection>>& detections);
std::vector<std::vector<LandmarkDetection>> read_detections(const std::string& path,
                                                            int num_frames = -1);

//   {"frame":t,"m1":[x,y],"m2":[x,y],"prob":p} or {"frame":t,"none":true}
void write_track(const std::string& path, const Track& track);
Track read_track(const std::string& path);

// Versioned plain-text parameter files.
void save_mlp(const std::string& path, const MlpParams& params);
MlpParams load_mlp(const std::string& path);
std::string format_mlp_params(const MlpParams& params);
MlpParams parse_mlp_params(const std::string& text);

void save_gcn(const std::string& path, const GcnParams& params);
GcnParams load_gcn(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace stent::io
