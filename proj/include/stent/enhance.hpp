#pragma once

#include <array>

#include "stent/core.hpp"
#include "stent/track.hpp"

namespace stent {

// Planar similarity: p -> scale * R(rotation) * p + translation.
struct Similarity2D {
  double rotation = 0.0;  // radians
  double scale = 1.0;
  Point2 translation;

  Point2 apply(Point2 p) const;
  Similarity2D inverse() const;
};

// The unique similarity mapping src[0] -> dst[0] and src[1] -> dst[1]
// exactly, via planar complex division. Throws when the source points
// coincide.
Similarity2D similarity_from_pairs(const std::array<Point2, 2>& src,
                                   const std::array<Point2, 2>& dst);

// Inverse-mapped bilinear warp; samples falling outside the source frame
// are zero. The identity transform reproduces the frame bit for bit.
GrayFrame warp_frame(const GrayFrame& frame, const Similarity2D& t);

struct EnhanceResult {
  GrayFrame image;
  int frames_used = 0;
};

// Motion-compensated averaging: the n tracked frames nearest the reference
// (including it) are registered marker pair to marker pair, warped, and
// averaged with out-of-bounds samples excluded by a weight mask. When fewer
// than n tracked frames exist, all available are used.
EnhanceResult enhance(const Sequence& seq, const Track& track, int n, int reference_frame);

}  // namespace stent
