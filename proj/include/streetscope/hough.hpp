#pragma once

#include <vector>

#include "streetscope/canny.hpp"
#include "streetscope/geometry.hpp"

namespace streetscope {

struct LineSegment {
  PixelPoint p_start;
  PixelPoint p_end;
  double angle = 0.0;   // radians in [0, pi), from +u toward +v
  double length = 0.0;  // pixels
  int support = 0;      // voting edge pixels
};

struct OrthogonalLineSets {
  std::vector<LineSegment> road_edges;          // converge to (u0, v0)
  std::vector<LineSegment> road_perpendiculars;  // near-horizontal, (u1, v0)
};

// Accumulator peak extraction with pixel peeling: the winning (rho, theta)
// bin's supporting pixels (within rho_res of the line) are refit by total
// least squares, split into runs with gaps <= max_gap, and removed from the
// accumulator before the next peak. Runs must span >= min_length pixels and
// carry >= min_votes support to be emitted.
std::vector<LineSegment> hough_lines(const EdgeMap& edges, double rho_res,
                                     double theta_res, int min_votes,
                                     double min_length, double max_gap);

// Near-horizontal segments (angle from horizontal <= angle_split) are road
// perpendiculars, the rest road edges; segments entirely within the top
// horizon_band rows are dropped.
OrthogonalLineSets split_orthogonal_sets(const std::vector<LineSegment>& lines,
                                         double horizon_band,
                                         double angle_split);

inline double angle_from_horizontal(double angle) {
  const double pi = 3.14159265358979323846;
  return angle <= pi / 2 ? angle : pi - angle;
}

}  // namespace streetscope
