#pragma once

#include <optional>
#include <vector>

#include "streetscope/calibration.hpp"
#include "streetscope/delaunay.hpp"
#include "streetscope/detections.hpp"
#include "streetscope/registration.hpp"

namespace streetscope {

struct GroupConfig {
  double t_c = 0.7;  // confidence threshold, inclusive
  double t_d = 6.0;  // max group edge distance, meters, inclusive
};

struct Group {
  std::vector<int> members;        // indices into the frame's detections
  int i_l = 0;                     // group size
  std::optional<double> i_d;       // mean pairwise distance, absent for singletons
  BngPoint centre;                 // centroid of member positions
};

struct FrameGroups {
  std::string camera_id;
  std::string clip_id;
  std::int64_t frame_index = 0;
  std::int64_t timestamp = 0;
  int i_n = 0;  // retained individuals
  int g_n = 0;  // group count
  std::vector<Group> groups;
  int dropped_above_horizon = 0;
};

// Bottom-center of the bounding box mapped through the camera and the
// registration. Throws HorizonOrAbove for boxes whose foot row sits at or
// above the horizon.
BngPoint ground_point(const Detection& d, const CameraModel& cam,
                      const RegistrationTransform& reg);

// Person detections at confidence >= t_c, georeferenced, Delaunay edges
// longer than t_d cut, connected components as groups.
FrameGroups detect_groups(const FrameDetections& frame, const CameraModel& cam,
                          const RegistrationTransform& reg,
                          const GroupConfig& config);

struct SceneMetrics {
  int max_groups_per_frame = 0;
  std::optional<double> min_group_distance;   // meters
  std::optional<double> mean_group_distance;  // meters
  std::vector<FrameGroups> frames;
};

// Frames with >= 2 groups triangulate their group centres; the scene minimum
// and mean are taken over those per-frame edge statistics.
SceneMetrics scene_metrics(std::vector<FrameGroups> frames);

std::string frame_groups_jsonl(const FrameGroups& fg);
std::string scene_metrics_jsonl(const SceneMetrics& sm,
                                const std::string& clip_id);

}  // namespace streetscope
