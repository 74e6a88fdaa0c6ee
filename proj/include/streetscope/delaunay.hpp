#pragma once

#include <array>
#include <vector>

#include "streetscope/geometry.hpp"

namespace streetscope {

struct Triangulation {
  std::vector<BngPoint> points;               // deduplicated, input order
  std::vector<std::array<int, 2>> edges;      // sorted pairs, ascending
  std::vector<std::array<int, 3>> triangles;  // sorted triples, ascending
  std::vector<int> vertex_of_input;           // original index -> vertex id
};

// Bowyer-Watson with a super-triangle, translated to the local centroid for
// conditioning. Exact duplicates are merged first; n < 3 or collinear input
// degenerates to the sorted nearest-neighbour chain with no triangles.
Triangulation delaunay(const std::vector<BngPoint>& input);

// > 0 when p lies inside the circumcircle of the ccw triangle (a, b, c).
double incircle(const BngPoint& a, const BngPoint& b, const BngPoint& c,
                const BngPoint& p);

}  // namespace streetscope
