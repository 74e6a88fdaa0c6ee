#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "streetscope/calibration.hpp"
#include "streetscope/geometry.hpp"

namespace streetscope {

// Geotagged urban furniture: pixel observation + surveyed BNG position.
struct Anchor {
  std::string id;
  PixelPoint pixel;
  BngPoint bng;  // easting, northing (OS 27700)
  std::string label;
};

// World plane -> BNG affine map. The (theta, k) block is a derived reporting
// decomposition of the fitted 2x2 matrix; reapplying it reconstructs
// a11..a22 within 1e-9.
struct RegistrationTransform {
  double a11 = 1, a12 = 0, a21 = 0, a22 = 1;
  double tx = 0, ty = 0;
  double theta = 0;
  double k1 = 1, k2 = 1, k3 = 0, k4 = 1;
  bool degenerate = false;  // |det| <= 1e-12 (diagnostic, fit still reported)
  std::vector<std::array<double, 2>> residuals;  // e per anchor (fit - truth)
};

RegistrationTransform fit_registration(const std::vector<Anchor>& anchors,
                                       const CameraModel& cam);

BngPoint apply_registration(const RegistrationTransform& t, const PlanePoint& q);

void decompose_affine(double a11, double a12, double a21, double a22,
                      double& theta, double& k1, double& k2, double& k3,
                      double& k4);

struct PairwiseError {
  double epsilon = 0;  // mean squared pairwise-distance discrepancy, m^2
  double rmse = 0;     // sqrt(epsilon), meters
};

// MSE between ground-truth anchor pairwise distances and the pairwise
// distances of the transformed anchor positions.
PairwiseError pairwise_distance_error(const std::vector<Anchor>& anchors,
                                      const RegistrationTransform& t,
                                      const CameraModel& cam);

struct SceneAnchors {
  std::vector<Anchor> anchors;
  CameraModel cam;
};

struct ValidationReport {
  double in_sample_error = 0;  // mean over scenes of full-fit rmse
  double holdout_error = 0;    // mean error at the removed anchor
  double discrepancy = 0;      // |holdout_error - in_sample_error|
  std::uint64_t seed = 0;
  std::vector<double> per_scene_holdout;
};

// Removes one uniformly random anchor per scene (seeded), refits on the rest
// and evaluates at the held-out anchor. Every scene needs >= 5 anchors so the
// reduced set still meets the fit minimum.
ValidationReport leave_one_out(const std::vector<SceneAnchors>& scenes,
                               std::uint64_t seed);

std::vector<Anchor> load_anchors_json(const std::string& path);
void save_registration_json(const RegistrationTransform& t,
                            const PairwiseError& err, const std::string& path);
RegistrationTransform load_registration_json(const std::string& path);

}  // namespace streetscope
