#include "stent/enhance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stent {

Point2 Similarity2D::apply(Point2 p) const {
  const double c = std::cos(rotation), s = std::sin(rotation);
  return {scale * (c * p.x - s * p.y) + translation.x,
          scale * (s * p.x + c * p.y) + translation.y};
}

Similarity2D Similarity2D::inverse() const {
  Similarity2D inv;
  inv.scale = 1.0 / scale;
  inv.rotation = -rotation;
  const double c = std::cos(inv.rotation), s = std::sin(inv.rotation);
  inv.translation = {-inv.scale * (c * translation.x - s * translation.y),
                     -inv.scale * (s * translation.x + c * translation.y)};
  return inv;
}

Similarity2D similarity_from_pairs(const std::array<Point2, 2>& src,
                                   const std::array<Point2, 2>& dst) {
  const Point2 sv = src[1] - src[0];
  if (sv.x == 0.0 && sv.y == 0.0)
    throw std::invalid_argument("similarity_from_pairs: source points coincide");
  const Point2 dv = dst[1] - dst[0];
  // q = dv / sv as complex numbers; q encodes scale and rotation.
  const double denom = sv.x * sv.x + sv.y * sv.y;
  const double qx = (dv.x * sv.x + dv.y * sv.y) / denom;
  const double qy = (dv.y * sv.x - dv.x * sv.y) / denom;
  Similarity2D t;
  t.scale = std::hypot(qx, qy);
  t.rotation = std::atan2(qy, qx);
  // translation = dst0 - q * src0
  t.translation = {dst[0].x - (qx * src[0].x - qy * src[0].y),
                   dst[0].y - (qy * src[0].x + qx * src[0].y)};
  return t;
}

namespace {

// Accumulates one warped frame into (sum, weight) buffers. Identity-safe:
// integer sample positions hit pixels exactly.
void warp_accumulate(const GrayFrame& frame, const Similarity2D& t, std::vector<double>& sum,
                     std::vector<double>& weight, int out_width, int out_height) {
  const Similarity2D inv = t.inverse();
  const double c = std::cos(inv.rotation), s = std::sin(inv.rotation);
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const double sx = inv.scale * (c * x - s * y) + inv.translation.x;
      const double sy = inv.scale * (s * x + c * y) + inv.translation.y;
      if (sx < 0.0 || sy < 0.0 || sx > frame.width - 1 || sy > frame.height - 1) continue;
      const std::size_t idx = static_cast<std::size_t>(y) * out_width + x;
      sum[idx] += bilinear_sample(frame, sx, sy);
      weight[idx] += 1.0;
    }
  }
}

}  // namespace

GrayFrame warp_frame(const GrayFrame& frame, const Similarity2D& t) {
  std::vector<double> sum(frame.pixels.size(), 0.0);
  std::vector<double> weight(frame.pixels.size(), 0.0);
  warp_accumulate(frame, t, sum, weight, frame.width, frame.height);
  GrayFrame out;
  out.width = frame.width;
  out.height = frame.height;
  out.pixels.resize(frame.pixels.size());
  for (std::size_t i = 0; i < sum.size(); ++i) {
    out.pixels[i] = weight[i] > 0.0
                        ? static_cast<std::uint8_t>(std::lround(std::clamp(sum[i], 0.0, 255.0)))
                        : 0;
  }
  return out;
}

EnhanceResult enhance(const Sequence& seq, const Track& track, int n, int reference_frame) {
  if (n < 1) throw std::invalid_argument("enhance: n must be >= 1");
  if (reference_frame < 0 || reference_frame >= static_cast<int>(seq.frames.size()))
    throw std::invalid_argument("enhance: reference frame out of range");
  if (track.frames.size() != seq.frames.size())
    throw std::invalid_argument("enhance: track must cover the sequence");
  if (!track.frames[static_cast<std::size_t>(reference_frame)].present)
    throw std::invalid_argument("enhance: reference frame has no track selection");

  std::vector<int> tracked;
  for (std::size_t t = 0; t < track.frames.size(); ++t)
    if (track.frames[t].present) tracked.push_back(static_cast<int>(t));
  std::sort(tracked.begin(), tracked.end(), [&](int a, int b) {
    const int da = std::abs(a - reference_frame), db = std::abs(b - reference_frame);
    if (da != db) return da < db;
    return a < b;
  });
  if (static_cast<int>(tracked.size()) > n) tracked.resize(static_cast<std::size_t>(n));
  std::sort(tracked.begin(), tracked.end());  // deterministic accumulation order

  const auto& ref = track.frames[static_cast<std::size_t>(reference_frame)].candidate;
  const std::array<Point2, 2> ref_pair = {ref.first.position, ref.second.position};

  const GrayFrame& ref_frame = seq.frames[static_cast<std::size_t>(reference_frame)];
  std::vector<double> sum(ref_frame.pixels.size(), 0.0);
  std::vector<double> weight(ref_frame.pixels.size(), 0.0);
  for (const int t : tracked) {
    const auto& cand = track.frames[static_cast<std::size_t>(t)].candidate;
    const std::array<Point2, 2> src = {cand.first.position, cand.second.position};
    const Similarity2D transform = similarity_from_pairs(src, ref_pair);
    warp_accumulate(seq.frames[static_cast<std::size_t>(t)], transform, sum, weight,
                    ref_frame.width, ref_frame.height);
  }

  EnhanceResult result;
  result.frames_used = static_cast<int>(tracked.size());
  result.image.width = ref_frame.width;
  result.image.height = ref_frame.height;
  result.image.pixels.resize(ref_frame.pixels.size());
  for (std::size_t i = 0; i < sum.size(); ++i) {
    result.image.pixels[i] =
        weight[i] > 0.0
            ? static_cast<std::uint8_t>(std::lround(std::clamp(sum[i] / weight[i], 0.0, 255.0)))
            : 0;
  }
  return result;
}

}  // namespace stent
