#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stent/core.hpp"

namespace stent {

// Flat background level of rendered frames. Markers and the mesh band are
// rendered as signed offsets from this level.
inline constexpr double kBackgroundLevel = 200.0;

struct SimConfig {
  int frames = 10;
  int width = 192;
  int height = 192;
  double cardiac_amplitude = 6.0;     // px
  double cardiac_frequency = 0.09;    // cycles per frame
  double respiratory_amplitude = 3.0; // px
  double respiratory_frequency = 0.023;
  double marker_sigma = 2.0;          // px
  double marker_depth = 70.0;         // intensity units below background
  double stent_contrast = 25.0;       // mesh band amplitude
  double stent_length = 60.0;         // marker separation, px
  double stent_angle = 0.45;          // radians, fixed per sequence
  int clutter_count = 0;              // static blobs that look exactly like markers
  double fp_rate = 0.0;               // expected false detections per frame
  double jitter_sigma = 0.0;          // detection localization noise, px
  double miss_probability = 0.0;      // per-marker miss chance
  double noise_sigma = 0.0;           // additive Gaussian pixel noise
  std::uint64_t seed = 1;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Renders a fully deterministic sequence: the marker-pair midpoint follows a
// sum of two sinusoids per axis (phases drawn from the seed), markers and
// clutter are dark Gaussian dips, and an alternating-contrast mesh band spans
// the gap between the markers. Throws when the trajectory can leave the frame.
std::pair<Sequence, GroundTruth> simulate_sequence(const SimConfig& config);

// Pre-made noisy detection lists: true markers with jitter and Beta(8,2)
// scores unless missed, plus Poisson-count uniform false positives with
// Beta(4,4) scores. Deterministic given the config seed.
std::vector<std::vector<LandmarkDetection>> simulate_detections(const GroundTruth& gt,
                                                                const SimConfig& config);

// key=value serialization, one field per line, '#' starts a comment.
SimConfig parse_sim_config(const std::string& text);
std::string format_sim_config(const SimConfig& config);
// Throws std::invalid_argument for unknown keys or unparsable values.
void apply_config_override(SimConfig& config, const std::string& key, const std::string& value);
std::vector<std::pair<std::string, std::string>> sim_config_kv(const SimConfig& config);

}  // namespace stent
