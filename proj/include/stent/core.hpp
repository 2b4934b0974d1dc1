#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace stent {

// Continuous image coordinates, origin at the top-left pixel center.
struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
double dot(Point2 a, Point2 b);
double norm(Point2 p);
double distance(Point2 a, Point2 b);

// One candidate balloon marker in one frame.
struct LandmarkDetection {
  Point2 position;
  double score = 0.0;  // confidence in [0, 1]
  int frame = 0;
};

// Boxes never collapse to zero area: an axis-aligned marker pair would
// otherwise produce a degenerate side, and IoU needs nonzero area.
inline constexpr double kMinBoxSide = 8.0;

struct BoundingBox {
  Point2 center;
  double width = kMinBoxSide;
  double height = kMinBoxSide;
};

// Center is the midpoint of the pair, side lengths are the per-axis
// spans clamped to kMinBoxSide. Symmetric in its arguments.
BoundingBox bbox_from_pair(Point2 a, Point2 b);

// Intersection over union of two axis-aligned boxes, 0 when disjoint.
double iou(const BoundingBox& b1, const BoundingBox& b2);

// An unordered landmark pair hypothesized to bracket one stent.
// Landmarks are stored in canonical order (by x, ties by y) so a
// candidate built from (a,b) equals one built from (b,a).
struct StentCandidate {
  LandmarkDetection first;
  LandmarkDetection second;
  double score = 0.0;  // mean of the two landmark scores
  BoundingBox bbox;
  int frame = 0;
};

// Throws std::invalid_argument when the landmarks disagree on the frame.
StentCandidate make_candidate(const LandmarkDetection& a, const LandmarkDetection& b);

// Vector from the canonical first landmark to the second.
Point2 pair_vector(const StentCandidate& c);

struct GrayFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  double at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }
};

// Bilinear interpolation with coordinates clamped to the frame borders.
double bilinear_sample(const GrayFrame& frame, double x, double y);

// Per-frame annotation: the true marker pair when the stent is visible.
struct GroundTruth {
  struct Entry {
    bool present = false;
    Point2 m1;
    Point2 m2;
  };
  std::vector<Entry> frames;
};

struct Sequence {
  std::vector<GrayFrame> frames;
  std::optional<GroundTruth> truth;
};

}  // namespace stent
