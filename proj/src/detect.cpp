#include "stent/detect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stent {

namespace {

struct DiskOffsets {
  std::vector<std::pair<int, int>> pts;
};

DiskOffsets disk_offsets(int radius) {
  DiskOffsets d;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) d.pts.emplace_back(dx, dy);
  return d;
}

// Morphological max/min with replicated borders.
template <typename Cmp>
std::vector<double> morph(const std::vector<double>& in, int w, int h, const DiskOffsets& disk,
                          Cmp better) {
  std::vector<double> out(in.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double best = in[static_cast<std::size_t>(y) * w + x];
      for (const auto& [dx, dy] : disk.pts) {
        const int sx = std::clamp(x + dx, 0, w - 1);
        const int sy = std::clamp(y + dy, 0, h - 1);
        const double v = in[static_cast<std::size_t>(sy) * w + sx];
        if (better(v, best)) best = v;
      }
      out[static_cast<std::size_t>(y) * w + x] = best;
    }
  }
  return out;
}

// Parabola vertex from three samples one pixel apart; 0 when not concave.
double quadratic_offset(double fm, double f0, double fp) {
  const double denom = fm - 2.0 * f0 + fp;
  if (denom >= -1e-12) return 0.0;
  return std::clamp((fm - fp) / (2.0 * denom), -0.5, 0.5);
}

}  // namespace

Heatmap tophat_response(const GrayFrame& frame, const DetectorParams& params) {
  if (frame.width <= 0 || frame.height <= 0) throw std::invalid_argument("tophat_response: empty frame");
  const int w = frame.width, h = frame.height;
  std::vector<double> img(frame.pixels.begin(), frame.pixels.end());
  const DiskOffsets disk = disk_offsets(std::max(1, params.tophat_radius));
  // closing = erode(dilate(img)); response = closing - img >= 0
  std::vector<double> dil = morph(img, w, h, disk, [](double a, double b) { return a > b; });
  std::vector<double> clo = morph(dil, w, h, disk, [](double a, double b) { return a < b; });
  Heatmap hm;
  hm.width = w;
  hm.height = h;
  hm.values.resize(img.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    hm.values[i] = clo[i] - img[i];
    peak = std::max(peak, hm.values[i]);
  }
  if (peak > 0.0)
    for (double& v : hm.values) v /= peak;
  return hm;
}

std::vector<LandmarkDetection> tophat_detect(const GrayFrame& frame, const DetectorParams& params,
                                             int frame_index) {
  const Heatmap hm = tophat_response(frame, params);
  std::vector<LandmarkDetection> dets =
      extract_peaks(hm, params.threshold, params.nms_radius, frame_index);
  if (static_cast<int>(dets.size()) > params.max_detections) {
    // extract_peaks returns peaks sorted by descending score
    dets.resize(static_cast<std::size_t>(params.max_detections));
  }
  return dets;
}

Heatmap render_heatmap(const std::vector<Point2>& points, double sigma, int width, int height) {
  if (sigma <= 0.0) throw std::invalid_argument("render_heatmap: sigma must be > 0");
  Heatmap hm;
  hm.width = width;
  hm.height = height;
  hm.values.assign(static_cast<std::size_t>(width) * height, 0.0);
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  const double reach = 5.0 * sigma;
  for (const Point2& c : points) {
    const int x_lo = std::max(0, static_cast<int>(std::floor(c.x - reach)));
    const int x_hi = std::min(width - 1, static_cast<int>(std::ceil(c.x + reach)));
    const int y_lo = std::max(0, static_cast<int>(std::floor(c.y - reach)));
    const int y_hi = std::min(height - 1, static_cast<int>(std::ceil(c.y + reach)));
    for (int y = y_lo; y <= y_hi; ++y) {
      for (int x = x_lo; x <= x_hi; ++x) {
        const double dx = x - c.x, dy = y - c.y;
        const double v = std::exp(-(dx * dx + dy * dy) * inv2s2);
        double& cell = hm.at(x, y);
        if (v > cell) cell = v;
      }
    }
  }
  return hm;
}

std::vector<LandmarkDetection> extract_peaks(const Heatmap& hm, double threshold,
                                             double nms_radius, int frame_index) {
  struct Peak {
    int x, y;
    double v;
  };
  std::vector<Peak> maxima;
  for (int y = 0; y < hm.height; ++y) {
    for (int x = 0; x < hm.width; ++x) {
      const double v = hm.at(x, y);
      if (v < threshold) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= hm.width || ny >= hm.height) continue;
          if (hm.at(nx, ny) > v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) maxima.push_back({x, y, v});
    }
  }
  std::sort(maxima.begin(), maxima.end(), [](const Peak& a, const Peak& b) {
    if (a.v != b.v) return a.v > b.v;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });

  std::vector<LandmarkDetection> out;
  std::vector<Peak> kept;
  for (const Peak& p : maxima) {
    bool suppressed = false;
    for (const Peak& k : kept) {
      const double dx = p.x - k.x, dy = p.y - k.y;
      if (dx * dx + dy * dy <= nms_radius * nms_radius) {
        suppressed = true;
        break;
      }
    }
    if (suppressed) continue;
    kept.push_back(p);

    double ox = 0.0, oy = 0.0;
    if (p.x > 0 && p.x < hm.width - 1)
      ox = quadratic_offset(hm.at(p.x - 1, p.y), p.v, hm.at(p.x + 1, p.y));
    if (p.y > 0 && p.y < hm.height - 1)
      oy = quadratic_offset(hm.at(p.x, p.y - 1), p.v, hm.at(p.x, p.y + 1));
    LandmarkDetection d;
    d.position = {p.x + ox, p.y + oy};
    d.score = p.v;
    d.frame = frame_index;
    out.push_back(d);
  }
  return out;
}

double heatmap_loss(const Heatmap& pred, const Heatmap& gt, double lambda1, double lambda2) {
  if (pred.width != gt.width || pred.height != gt.height)
    throw std::invalid_argument("heatmap_loss: dimension mismatch");
  const std::size_t n = pred.values.size();
  double sq = 0.0, under = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = gt.values[i] - pred.values[i];
    sq += d * d;
    if (d > 0.0) under += d * d;
  }
  return (lambda1 * sq + lambda2 * under) / static_cast<double>(n);
}

Heatmap correct_heatmap(const Heatmap& hm, const std::vector<LandmarkDetection>& detections,
                        const std::vector<double>& node_probs, int window) {
  if (detections.size() != node_probs.size())
    throw std::invalid_argument("correct_heatmap: detections and node_probs must align");
  if (window < 1 || window % 2 == 0)
    throw std::invalid_argument("correct_heatmap: window must be odd and positive");
  const int half = window / 2;
  // -1 marks pixels covered by no window; those keep their value.
  std::vector<double> mult(hm.values.size(), -1.0);
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const int cx = static_cast<int>(std::lround(detections[i].position.x));
    const int cy = static_cast<int>(std::lround(detections[i].position.y));
    const double p = node_probs[i];
    for (int y = std::max(0, cy - half); y <= std::min(hm.height - 1, cy + half); ++y) {
      for (int x = std::max(0, cx - half); x <= std::min(hm.width - 1, cx + half); ++x) {
        double& m = mult[static_cast<std::size_t>(y) * hm.width + x];
        if (p > m) m = p;
      }
    }
  }
  Heatmap out = hm;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (mult[i] >= 0.0) out.values[i] *= mult[i];
  }
  return out;
}

}  // namespace stent
