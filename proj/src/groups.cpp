#include "streetscope/groups.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "streetscope/errors.hpp"
#include "streetscope/timeutil.hpp"

namespace streetscope {

namespace {

using json = nlohmann::ordered_json;

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

BngPoint ground_point(const Detection& d, const CameraModel& cam,
                      const RegistrationTransform& reg) {
  const PlanePoint q = image_to_world(cam, {d.anchor_u(), d.anchor_v()});
  return apply_registration(reg, q);
}

FrameGroups detect_groups(const FrameDetections& frame, const CameraModel& cam,
                          const RegistrationTransform& reg,
                          const GroupConfig& config) {
  if (!(config.t_c > 0.0) || config.t_c > 1.0 || !(config.t_d > 0.0))
    throw Error("invalid group config: need 0 < t_c <= 1 and t_d > 0");

  FrameGroups out;
  out.camera_id = frame.camera_id;
  out.clip_id = frame.clip_id;
  out.frame_index = frame.frame_index;
  out.timestamp = frame.timestamp;

  std::vector<int> retained;          // indices into frame.detections
  std::vector<BngPoint> positions;    // parallel to retained
  for (std::size_t i = 0; i < frame.detections.size(); ++i) {
    const Detection& d = frame.detections[i];
    if (d.cls != DetectionClass::person) continue;
    if (d.confidence < config.t_c) continue;
    try {
      positions.push_back(ground_point(d, cam, reg));
      retained.push_back(static_cast<int>(i));
    } catch (const HorizonOrAbove&) {
      ++out.dropped_above_horizon;
    }
  }
  out.i_n = static_cast<int>(retained.size());
  if (retained.empty()) return out;

  const Triangulation tri = delaunay(positions);
  UnionFind uf(static_cast<int>(tri.points.size()));
  for (const auto& e : tri.edges)
    if (distance(tri.points[e[0]], tri.points[e[1]]) <= config.t_d)
      uf.unite(e[0], e[1]);

  // Component root (by triangulation vertex) -> group, ordered by first
  // retained member.
  std::vector<int> root_of_member(retained.size());
  for (std::size_t m = 0; m < retained.size(); ++m)
    root_of_member[m] = uf.find(tri.vertex_of_input[m]);

  std::vector<int> group_of_root(tri.points.size(), -1);
  for (std::size_t m = 0; m < retained.size(); ++m) {
    const int root = root_of_member[m];
    if (group_of_root[root] < 0) {
      group_of_root[root] = static_cast<int>(out.groups.size());
      out.groups.emplace_back();
    }
    Group& g = out.groups[group_of_root[root]];
    g.members.push_back(retained[m]);
  }

  for (std::size_t m = 0; m < retained.size(); ++m) {
    Group& g = out.groups[group_of_root[root_of_member[m]]];
    g.centre.easting += positions[m].easting;
    g.centre.northing += positions[m].northing;
  }
  for (auto& g : out.groups) {
    g.i_l = static_cast<int>(g.members.size());
    g.centre.easting /= g.i_l;
    g.centre.northing /= g.i_l;
  }

  // Mean over all unordered member pairs (duplicates contribute zeros).
  std::vector<std::vector<const BngPoint*>> member_pos(out.groups.size());
  for (std::size_t m = 0; m < retained.size(); ++m)
    member_pos[group_of_root[root_of_member[m]]].push_back(&positions[m]);
  for (std::size_t gi = 0; gi < out.groups.size(); ++gi) {
    Group& g = out.groups[gi];
    if (g.i_l < 2) continue;
    double sum = 0;
    std::size_t pairs = 0;
    const auto& pos = member_pos[gi];
    for (std::size_t a = 0; a < pos.size(); ++a)
      for (std::size_t b = a + 1; b < pos.size(); ++b) {
        sum += distance(*pos[a], *pos[b]);
        ++pairs;
      }
    g.i_d = sum / static_cast<double>(pairs);
  }

  out.g_n = static_cast<int>(out.groups.size());
  return out;
}

SceneMetrics scene_metrics(std::vector<FrameGroups> frames) {
  if (frames.empty()) throw EmptyScene("scene has no frames");
  SceneMetrics sm;
  double min_dist = 0;
  bool have_min = false;
  double mean_sum = 0;
  std::size_t mean_frames = 0;
  for (const auto& fg : frames) {
    sm.max_groups_per_frame = std::max(sm.max_groups_per_frame, fg.g_n);
    if (fg.g_n < 2) continue;
    std::vector<BngPoint> centres;
    centres.reserve(fg.groups.size());
    for (const auto& g : fg.groups) centres.push_back(g.centre);
    const Triangulation tri = delaunay(centres);
    if (tri.edges.empty()) continue;
    double frame_min = 0, frame_sum = 0;
    bool first = true;
    for (const auto& e : tri.edges) {
      const double d = distance(tri.points[e[0]], tri.points[e[1]]);
      frame_min = first ? d : std::min(frame_min, d);
      first = false;
      frame_sum += d;
    }
    const double frame_mean = frame_sum / static_cast<double>(tri.edges.size());
    if (!have_min || frame_min < min_dist) min_dist = frame_min;
    have_min = true;
    mean_sum += frame_mean;
    ++mean_frames;
  }
  if (have_min) sm.min_group_distance = min_dist;
  if (mean_frames > 0)
    sm.mean_group_distance = mean_sum / static_cast<double>(mean_frames);
  sm.frames = std::move(frames);
  return sm;
}

std::string frame_groups_jsonl(const FrameGroups& fg) {
  json j;
  j["type"] = "frame";
  j["camera_id"] = fg.camera_id;
  j["clip_id"] = fg.clip_id;
  j["frame_index"] = fg.frame_index;
  j["timestamp"] = format_rfc3339(fg.timestamp);
  j["i_n"] = fg.i_n;
  j["g_n"] = fg.g_n;
  j["dropped_above_horizon"] = fg.dropped_above_horizon;
  json groups = json::array();
  for (const auto& g : fg.groups) {
    json gj;
    gj["members"] = g.members;
    gj["i_l"] = g.i_l;
    if (g.i_d)
      gj["i_d"] = *g.i_d;
    else
      gj["i_d"] = nullptr;
    gj["centre"] = {g.centre.easting, g.centre.northing};
    groups.push_back(gj);
  }
  j["groups"] = groups;
  return j.dump();
}

std::string scene_metrics_jsonl(const SceneMetrics& sm,
                                const std::string& clip_id) {
  json j;
  j["type"] = "scene";
  j["clip_id"] = clip_id;
  j["frames"] = sm.frames.size();
  j["max_groups_per_frame"] = sm.max_groups_per_frame;
  if (sm.min_group_distance)
    j["min_group_distance"] = *sm.min_group_distance;
  else
    j["min_group_distance"] = nullptr;
  if (sm.mean_group_distance)
    j["mean_group_distance"] = *sm.mean_group_distance;
  else
    j["mean_group_distance"] = nullptr;
  return j.dump();
}

}  // namespace streetscope
