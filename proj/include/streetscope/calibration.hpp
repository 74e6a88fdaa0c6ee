#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "streetscope/geometry.hpp"
#include "streetscope/hough.hpp"

namespace streetscope {

struct VanishingEstimate {
  PixelPoint point;
  int votes = 0;        // pairwise intersections in the winning bin
  double bin_size = 0;  // grid pitch used for voting
};

// Mode of the pairwise infinite-line intersections on a bin_size grid; the
// returned point is the centroid of the winning bin's intersections.
VanishingEstimate estimate_vanishing_point(const std::vector<LineSegment>& lines,
                                           double bin_size);

struct FrameVanishingPair {
  VanishingEstimate road_edges;          // -> (u0, v0)
  VanishingEstimate road_perpendiculars;  // -> (u1, v0)
};

struct SceneVanishing {
  double u0 = 0, v0 = 0, u1 = 0;
};

// Arithmetic means across frames; v0 pools the v of both vanishing points
// (flat-horizon assumption).
SceneVanishing aggregate_scene_estimates(const std::vector<FrameVanishingPair>& per_frame);

// Simplified pinhole model built from the two ground-plane vanishing points
// and the camera height. H maps world-plane (X, Y, 1) homogeneous coordinates
// to image pixels.
struct CameraModel {
  std::string camera_id;
  int image_width = 0;
  int image_height = 0;
  double u0 = 0, v0 = 0, u1 = 0;  // vanishing points (u0,v0), (u1,v0)
  double h = 0;                   // camera height, meters
  double f = 0;                   // derived focal length, pixels
  Eigen::Matrix3d H = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d H_inv = Eigen::Matrix3d::Identity();
  // Back-projected unit directions of the two vanishing points and the world
  // up axis, in camera coordinates.
  Eigen::Vector3d d0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d d1 = Eigen::Vector3d::Zero();
  Eigen::Vector3d r3 = Eigen::Vector3d::Zero();

  double cx() const { return image_width / 2.0; }
  double cy() const { return image_height / 2.0; }
};

CameraModel build_camera(int image_width, int image_height, double u0,
                         double v0, double u1, double camera_height);

// Homogeneous application of H_inv / H. image_to_world requires the pixel at
// least 0.5 px below the horizon row v0; world_to_image requires positive
// camera-frame depth.
PlanePoint image_to_world(const CameraModel& cam, const PixelPoint& p);
PixelPoint world_to_image(const CameraModel& cam, const PlanePoint& q);

// Camera-frame depth of a plane point (meters along the optical axis).
double plane_depth(const CameraModel& cam, const PlanePoint& q);

struct HeightObject {
  PixelPoint bottom;
  PixelPoint top;
  double physical_height = 0;  // meters
};

// Scale recovery from a known-height object: bisection on h matching the
// projected object top row to the observed one (residual < 1e-6 px). The
// camera's own h field is ignored; only its vanishing geometry is used.
double estimate_height(const CameraModel& cam, const HeightObject& object);
double estimate_height(const CameraModel& cam,
                       const std::vector<HeightObject>& objects);

struct ParamDeltas {
  double du0 = 0, dv0 = 0, du1 = 0, dh = 0;
};

struct UncertaintyReport {
  double dX = 0, dY = 0;                      // meters
  std::optional<double> rel_dX, rel_dY;       // absent when |coord| < 1e-9
  std::array<double, 4> contrib_dX{};         // per parameter u0, v0, u1, h
  std::array<double, 4> contrib_dY{};
};

// Total differential of the mapped world position over {u0, v0, u1, h},
// partials by central finite differences.
UncertaintyReport position_uncertainty(const CameraModel& cam,
                                       const PixelPoint& p,
                                       const ParamDeltas& deltas);

CameraModel load_camera_json(const std::string& path);
void save_camera_json(const CameraModel& cam, const std::string& path);

}  // namespace streetscope
