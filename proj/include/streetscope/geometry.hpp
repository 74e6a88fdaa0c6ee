#pragma once

#include <cmath>

namespace streetscope {

// Image-plane coordinates; v increases downward.
struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
};

// Unreferenced world plane (Z = 0), meters.
struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
};

// British National Grid (OS 27700), meters.
struct BngPoint {
  double easting = 0.0;
  double northing = 0.0;
};

inline double distance(const BngPoint& a, const BngPoint& b) {
  return std::hypot(a.easting - b.easting, a.northing - b.northing);
}

inline double distance(const PlanePoint& a, const PlanePoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double distance(const PixelPoint& a, const PixelPoint& b) {
  return std::hypot(a.u - b.u, a.v - b.v);
}

}  // namespace streetscope
