#include "stent/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stent {

double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

double norm(Point2 p) { return std::hypot(p.x, p.y); }

double distance(Point2 a, Point2 b) { return norm(a - b); }

BoundingBox bbox_from_pair(Point2 a, Point2 b) {
  BoundingBox box;
  box.center = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  box.width = std::max(std::abs(a.x - b.x), kMinBoxSide);
  box.height = std::max(std::abs(a.y - b.y), kMinBoxSide);
  return box;
}

double iou(const BoundingBox& b1, const BoundingBox& b2) {
  const double l1 = b1.center.x - 0.5 * b1.width, r1 = b1.center.x + 0.5 * b1.width;
  const double t1 = b1.center.y - 0.5 * b1.height, d1 = b1.center.y + 0.5 * b1.height;
  const double l2 = b2.center.x - 0.5 * b2.width, r2 = b2.center.x + 0.5 * b2.width;
  const double t2 = b2.center.y - 0.5 * b2.height, d2 = b2.center.y + 0.5 * b2.height;
  const double iw = std::min(r1, r2) - std::max(l1, l2);
  const double ih = std::min(d1, d2) - std::max(t1, t2);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = b1.width * b1.height + b2.width * b2.height - inter;
  return inter / uni;
}

namespace {
bool before(const Point2& a, const Point2& b) {
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}
}  // namespace

StentCandidate make_candidate(const LandmarkDetection& a, const LandmarkDetection& b) {
  if (a.frame != b.frame) throw std::invalid_argument("make_candidate: landmarks from different frames");
  StentCandidate c;
  if (before(b.position, a.position)) {
    c.first = b;
    c.second = a;
  } else {
    c.first = a;
    c.second = b;
  }
  c.score = 0.5 * (a.score + b.score);
  c.bbox = bbox_from_pair(a.position, b.position);
  c.frame = a.frame;
  return c;
}

Point2 pair_vector(const StentCandidate& c) { return c.second.position - c.first.position; }

double bilinear_sample(const GrayFrame& frame, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(frame.width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(frame.height - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, frame.width - 1);
  const int y1 = std::min(y0 + 1, frame.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double v00 = frame.at(x0, y0), v10 = frame.at(x1, y0);
  const double v01 = frame.at(x0, y1), v11 = frame.at(x1, y1);
  return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
}

}  // namespace stent
