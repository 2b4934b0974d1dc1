#include "stent/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "stent/rng.hpp"

namespace stent {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Stream tags; one per independent source of randomness.
enum Tag : std::uint64_t {
  kTagPhases = 1,
  kTagClutter = 2,
  kTagNoise = 3,       // (frame)
  kTagDetMarker = 4,   // (frame, marker)
  kTagDetFpCount = 5,  // (frame)
  kTagDetFp = 6,       // (frame, k)
  kTagBandPhase = 7,
};

// Mesh band geometry between the two markers.
constexpr double kBandHalfWidth = 5.0;
constexpr double kBandPeriod = 6.0;      // px along the stent axis
constexpr double kBandMarginLo = 6.0;    // band is zero this close to a marker
constexpr double kBandMarginHi = 10.0;   // and fully on past this distance

double smoothstep(double e0, double e1, double x) {
  const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

struct Trajectory {
  double x0, y0;
  double phase_cx, phase_bx, phase_cy, phase_by;
  const SimConfig* cfg;

  Point2 midpoint(int t) const {
    const double tc = 2.0 * kPi * cfg->cardiac_frequency * t;
    const double tb = 2.0 * kPi * cfg->respiratory_frequency * t;
    return {x0 + cfg->cardiac_amplitude * std::sin(tc + phase_cx) +
                cfg->respiratory_amplitude * std::sin(tb + phase_bx),
            y0 + cfg->cardiac_amplitude * std::sin(tc + phase_cy) +
                cfg->respiratory_amplitude * std::sin(tb + phase_by)};
  }
};

// Stamp a dark Gaussian dip; only touches pixels within 4 sigma.
void stamp_dip(std::vector<double>& img, int w, int h, Point2 c, double sigma, double depth) {
  const double reach = 4.0 * sigma;
  const int x_lo = std::max(0, static_cast<int>(std::floor(c.x - reach)));
  const int x_hi = std::min(w - 1, static_cast<int>(std::ceil(c.x + reach)));
  const int y_lo = std::max(0, static_cast<int>(std::floor(c.y - reach)));
  const int y_hi = std::min(h - 1, static_cast<int>(std::ceil(c.y + reach)));
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      const double dx = x - c.x, dy = y - c.y;
      img[static_cast<std::size_t>(y) * w + x] -= depth * std::exp(-(dx * dx + dy * dy) * inv2s2);
    }
  }
}

// Alternating-contrast rungs across the marker-to-marker axis, tapered at
// both ends so the marker neighborhoods stay clean. The rung phase is a
// per-sequence property; no two stents present the same mesh alignment.
void stamp_band(std::vector<double>& img, int w, int h, Point2 m1, Point2 m2, double contrast,
                double phase) {
  const Point2 axis = m2 - m1;
  const double len = norm(axis);
  if (len <= 2.0 * kBandMarginLo || contrast == 0.0) return;
  const Point2 u = (1.0 / len) * axis;
  const double x_min = std::min(m1.x, m2.x) - kBandHalfWidth - 1.0;
  const double x_max = std::max(m1.x, m2.x) + kBandHalfWidth + 1.0;
  const double y_min = std::min(m1.y, m2.y) - kBandHalfWidth - 1.0;
  const double y_max = std::max(m1.y, m2.y) + kBandHalfWidth + 1.0;
  const int x_lo = std::max(0, static_cast<int>(std::floor(x_min)));
  const int x_hi = std::min(w - 1, static_cast<int>(std::ceil(x_max)));
  const int y_lo = std::max(0, static_cast<int>(std::floor(y_min)));
  const int y_hi = std::min(h - 1, static_cast<int>(std::ceil(y_max)));
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      const Point2 d = Point2{static_cast<double>(x), static_cast<double>(y)} - m1;
      const double s = dot(d, u);
      if (s <= 0.0 || s >= len) continue;
      const double perp = d.x * u.y - d.y * u.x;
      if (std::abs(perp) > kBandHalfWidth) continue;
      const double taper = smoothstep(kBandMarginLo, kBandMarginHi, s) *
                           smoothstep(kBandMarginLo, kBandMarginHi, len - s);
      if (taper == 0.0) continue;
      const double rung = std::sin(2.0 * kPi * s / kBandPeriod + phase);
      const double cross = std::cos(0.5 * kPi * perp / kBandHalfWidth);
      img[static_cast<std::size_t>(y) * w + x] += contrast * rung * cross * taper;
    }
  }
}

void check(bool ok, const char* field, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("SimConfig: ") + field + " " + what);
}

}  // namespace

void SimConfig::validate() const {
  check(frames >= 1, "frames", "must be >= 1");
  check(width >= 16 && height >= 16, "width/height", "must be >= 16");
  check(cardiac_amplitude >= 0.0, "cardiac_amplitude", "must be >= 0");
  check(respiratory_amplitude >= 0.0, "respiratory_amplitude", "must be >= 0");
  check(cardiac_frequency >= 0.0 && cardiac_frequency < 0.5, "cardiac_frequency",
        "must be in [0, 0.5)");
  check(respiratory_frequency >= 0.0 && respiratory_frequency < 0.5, "respiratory_frequency",
        "must be in [0, 0.5)");
  check(marker_sigma > 0.0, "marker_sigma", "must be > 0");
  check(marker_depth >= 0.0, "marker_depth", "must be >= 0");
  check(stent_length > 0.0, "stent_length", "must be > 0");
  check(clutter_count >= 0, "clutter_count", "must be >= 0");
  check(fp_rate >= 0.0, "fp_rate", "must be >= 0");
  check(jitter_sigma >= 0.0, "jitter_sigma", "must be >= 0");
  check(miss_probability >= 0.0 && miss_probability <= 1.0, "miss_probability",
        "must be in [0, 1]");
  check(noise_sigma >= 0.0, "noise_sigma", "must be >= 0");

  // Worst-case marker excursion must stay inside the frame with margin for
  // the rendered blob; phases cannot rescue a config that can clip.
  const double half = 0.5 * stent_length;
  const double ext_x = std::abs(half * std::cos(stent_angle));
  const double ext_y = std::abs(half * std::sin(stent_angle));
  const double sway = cardiac_amplitude + respiratory_amplitude;
  const double margin = 3.0 * marker_sigma + 2.0;
  const double cx = 0.5 * (width - 1), cy = 0.5 * (height - 1);
  check(cx - ext_x - sway - margin >= 0.0 && cx + ext_x + sway + margin <= width - 1,
        "trajectory", "leaves the frame horizontally");
  check(cy - ext_y - sway - margin >= 0.0 && cy + ext_y + sway + margin <= height - 1,
        "trajectory", "leaves the frame vertically");
}

std::pair<Sequence, GroundTruth> simulate_sequence(const SimConfig& config) {
  config.validate();
  const int w = config.width, h = config.height;

  Trajectory traj;
  traj.cfg = &config;
  traj.x0 = 0.5 * (w - 1);
  traj.y0 = 0.5 * (h - 1);
  {
    rng::Stream phases(config.seed, kTagPhases);
    traj.phase_cx = phases.uniform(0.0, 2.0 * kPi);
    traj.phase_bx = phases.uniform(0.0, 2.0 * kPi);
    traj.phase_cy = phases.uniform(0.0, 2.0 * kPi);
    traj.phase_by = phases.uniform(0.0, 2.0 * kPi);
  }

  const double band_phase = rng::Stream(config.seed, kTagBandPhase).uniform(0.0, 2.0 * kPi);

  std::vector<Point2> clutter;
  {
    rng::Stream cs(config.seed, kTagClutter);
    const double margin = 10.0;
    for (int i = 0; i < config.clutter_count; ++i) {
      clutter.push_back({cs.uniform(margin, w - 1 - margin), cs.uniform(margin, h - 1 - margin)});
    }
  }

  const Point2 half_axis = {0.5 * config.stent_length * std::cos(config.stent_angle),
                            0.5 * config.stent_length * std::sin(config.stent_angle)};

  Sequence seq;
  GroundTruth gt;
  seq.frames.reserve(static_cast<std::size_t>(config.frames));
  gt.frames.reserve(static_cast<std::size_t>(config.frames));

  std::vector<double> img(static_cast<std::size_t>(w) * h);
  for (int t = 0; t < config.frames; ++t) {
    const Point2 mid = traj.midpoint(t);
    const Point2 m1 = mid - half_axis;
    const Point2 m2 = mid + half_axis;
    gt.frames.push_back({true, m1, m2});

    std::fill(img.begin(), img.end(), kBackgroundLevel);
    stamp_dip(img, w, h, m1, config.marker_sigma, config.marker_depth);
    stamp_dip(img, w, h, m2, config.marker_sigma, config.marker_depth);
    for (const Point2& c : clutter) stamp_dip(img, w, h, c, config.marker_sigma, config.marker_depth);
    stamp_band(img, w, h, m1, m2, config.stent_contrast, band_phase);

    GrayFrame frame;
    frame.width = w;
    frame.height = h;
    frame.pixels.resize(img.size());
    rng::Stream noise(config.seed, kTagNoise, static_cast<std::uint64_t>(t));
    for (std::size_t i = 0; i < img.size(); ++i) {
      double v = img[i];
      if (config.noise_sigma > 0.0) v += noise.normal(0.0, config.noise_sigma);
      frame.pixels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
    seq.frames.push_back(std::move(frame));
  }
  seq.truth = gt;
  return {std::move(seq), std::move(gt)};
}

std::vector<std::vector<LandmarkDetection>> simulate_detections(const GroundTruth& gt,
                                                                const SimConfig& config) {
  std::vector<std::vector<LandmarkDetection>> out(gt.frames.size());
  for (std::size_t t = 0; t < gt.frames.size(); ++t) {
    const auto& entry = gt.frames[t];
    auto& dets = out[t];
    if (entry.present) {
      const Point2 markers[2] = {entry.m1, entry.m2};
      for (int k = 0; k < 2; ++k) {
        rng::Stream s(config.seed, kTagDetMarker, t, static_cast<std::uint64_t>(k));
        if (s.uniform01() < config.miss_probability) continue;
        LandmarkDetection d;
        d.position = {markers[k].x + s.normal(0.0, config.jitter_sigma),
                      markers[k].y + s.normal(0.0, config.jitter_sigma)};
        d.score = std::clamp(s.beta_int(8, 2), 0.0, 1.0);
        d.frame = static_cast<int>(t);
        dets.push_back(d);
      }
    }
    const int fp_count = rng::Stream(config.seed, kTagDetFpCount, t).poisson(config.fp_rate);
    for (int k = 0; k < fp_count; ++k) {
      rng::Stream s(config.seed, kTagDetFp, t, static_cast<std::uint64_t>(k));
      LandmarkDetection d;
      d.position = {s.uniform(0.0, config.width - 1), s.uniform(0.0, config.height - 1)};
      d.score = std::clamp(s.beta_int(4, 4), 0.0, 1.0);
      d.frame = static_cast<int>(t);
      dets.push_back(d);
    }
  }
  return out;
}

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::vector<std::pair<std::string, std::string>> sim_config_kv(const SimConfig& c) {
  return {
      {"frames", std::to_string(c.frames)},
      {"width", std::to_string(c.width)},
      {"height", std::to_string(c.height)},
      {"cardiac_amplitude", format_double(c.cardiac_amplitude)},
      {"cardiac_frequency", format_double(c.cardiac_frequency)},
      {"respiratory_amplitude", format_double(c.respiratory_amplitude)},
      {"respiratory_frequency", format_double(c.respiratory_frequency)},
      {"marker_sigma", format_double(c.marker_sigma)},
      {"marker_depth", format_double(c.marker_depth)},
      {"stent_contrast", format_double(c.stent_contrast)},
      {"stent_length", format_double(c.stent_length)},
      {"stent_angle", format_double(c.stent_angle)},
      {"clutter_count", std::to_string(c.clutter_count)},
      {"fp_rate", format_double(c.fp_rate)},
      {"jitter_sigma", format_double(c.jitter_sigma)},
      {"miss_probability", format_double(c.miss_probability)},
      {"noise_sigma", format_double(c.noise_sigma)},
      {"seed", std::to_string(c.seed)},
  };
}

std::string format_sim_config(const SimConfig& c) {
  std::ostringstream os;
  for (const auto& [k, v] : sim_config_kv(c)) os << k << "=" << v << "\n";
  return os.str();
}

void apply_config_override(SimConfig& c, const std::string& key, const std::string& value) {
  try {
    if (key == "frames") c.frames = std::stoi(value);
    else if (key == "width") c.width = std::stoi(value);
    else if (key == "height") c.height = std::stoi(value);
    else if (key == "cardiac_amplitude") c.cardiac_amplitude = std::stod(value);
    else if (key == "cardiac_frequency") c.cardiac_frequency = std::stod(value);
    else if (key == "respiratory_amplitude") c.respiratory_amplitude = std::stod(value);
    else if (key == "respiratory_frequency") c.respiratory_frequency = std::stod(value);
    else if (key == "marker_sigma") c.marker_sigma = std::stod(value);
    else if (key == "marker_depth") c.marker_depth = std::stod(value);
    else if (key == "stent_contrast") c.stent_contrast = std::stod(value);
    else if (key == "stent_length") c.stent_length = std::stod(value);
    else if (key == "stent_angle") c.stent_angle = std::stod(value);
    else if (key == "clutter_count") c.clutter_count = std::stoi(value);
    else if (key == "fp_rate") c.fp_rate = std::stod(value);
    else if (key == "jitter_sigma") c.jitter_sigma = std::stod(value);
    else if (key == "miss_probability") c.miss_probability = std::stod(value);
    else if (key == "noise_sigma") c.noise_sigma = std::stod(value);
    else if (key == "seed") c.seed = std::stoull(value);
    else throw std::invalid_argument("SimConfig: unknown key '" + key + "'");
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("SimConfig: bad value for '" + key + "': " + value);
  }
}

SimConfig parse_sim_config(const std::string& text) {
  SimConfig c;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("SimConfig: expected key=value, got '" + line + "'");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto kend = key.find_last_not_of(" \t");
    key = key.substr(0, kend + 1);
    const auto vstart = value.find_first_not_of(" \t");
    value = vstart == std::string::npos ? "" : value.substr(vstart);
    apply_config_override(c, key, value);
  }
  return c;
}

}  // namespace stent
