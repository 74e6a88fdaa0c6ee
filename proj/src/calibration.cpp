#include "streetscope/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>

#include <nlohmann/json.hpp>

#include "streetscope/errors.hpp"

namespace streetscope {

namespace {

using json = nlohmann::ordered_json;

// Homogeneous line through a segment's endpoints.
Eigen::Vector3d homogeneous_line(const LineSegment& s) {
  const Eigen::Vector3d a(s.p_start.u, s.p_start.v, 1.0);
  const Eigen::Vector3d b(s.p_end.u, s.p_end.v, 1.0);
  return a.cross(b);
}

double angle_gap(double a, double b) {
  const double pi = std::numbers::pi;
  double d = std::abs(a - b);
  while (d >= pi) d -= pi;
  return std::min(d, pi - d);
}

}  // namespace

VanishingEstimate estimate_vanishing_point(const std::vector<LineSegment>& lines,
                                           double bin_size) {
  if (lines.size() < 2)
    throw InsufficientLines("need at least 2 lines, got " +
                            std::to_string(lines.size()));
  if (!(bin_size > 0.0)) throw Error("bin_size must be positive");

  std::vector<Eigen::Vector3d> hom;
  hom.reserve(lines.size());
  for (const auto& s : lines) hom.push_back(homogeneous_line(s));

  struct Key {
    long long ix, iy;
    bool operator<(const Key& o) const {
      return ix != o.ix ? ix < o.ix : iy < o.iy;
    }
  };
  std::map<Key, std::vector<PixelPoint>> bins;
  std::size_t n_intersections = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      if (angle_gap(lines[i].angle, lines[j].angle) < 1e-3) continue;
      const Eigen::Vector3d x = hom[i].cross(hom[j]);
      if (std::abs(x.z()) < 1e-12 * std::max(std::abs(x.x()), std::abs(x.y())))
        continue;
      const PixelPoint p{x.x() / x.z(), x.y() / x.z()};
      if (!std::isfinite(p.u) || !std::isfinite(p.v)) continue;
      ++n_intersections;
      const Key k{static_cast<long long>(std::floor(p.u / bin_size)),
                  static_cast<long long>(std::floor(p.v / bin_size))};
      bins[k].push_back(p);
    }
  }
  if (n_intersections == 0)
    throw NoIntersection("all line pairs are near-parallel");

  const std::vector<PixelPoint>* best = nullptr;
  for (const auto& [key, pts] : bins)
    if (!best || pts.size() > best->size()) best = &pts;

  // Sorted before summing so the centroid is exactly permutation-invariant.
  std::vector<PixelPoint> members = *best;
  std::sort(members.begin(), members.end(), [](const PixelPoint& a, const PixelPoint& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  double su = 0, sv = 0;
  for (const auto& p : members) {
    su += p.u;
    sv += p.v;
  }
  const double n = static_cast<double>(members.size());
  return VanishingEstimate{{su / n, sv / n}, static_cast<int>(members.size()),
                           bin_size};
}

SceneVanishing aggregate_scene_estimates(
    const std::vector<FrameVanishingPair>& per_frame) {
  if (per_frame.empty()) throw Error("aggregate_scene_estimates: no frames");
  double su0 = 0, su1 = 0, sv = 0;
  for (const auto& fr : per_frame) {
    su0 += fr.road_edges.point.u;
    su1 += fr.road_perpendiculars.point.u;
    sv += fr.road_edges.point.v + fr.road_perpendiculars.point.v;
  }
  const double n = static_cast<double>(per_frame.size());
  return SceneVanishing{su0 / n, sv / (2.0 * n), su1 / n};
}

CameraModel build_camera(int image_width, int image_height, double u0,
                         double v0, double u1, double camera_height) {
  if (!(camera_height > 0.0)) throw Error("camera height must be positive");
  CameraModel cam;
  cam.image_width = image_width;
  cam.image_height = image_height;
  cam.u0 = u0;
  cam.v0 = v0;
  cam.u1 = u1;
  cam.h = camera_height;

  const double cx = cam.cx();
  const double cy = cam.cy();
  const double f2 = -((u0 - cx) * (u1 - cx) + (v0 - cy) * (v0 - cy));
  if (!(f2 > 0.0))
    throw DegenerateVanishingPoints(
        "vanishing points do not subtend an orthogonal pair (f^2 = " +
        std::to_string(-f2) + ")");
  cam.f = std::sqrt(f2);

  cam.d0 = Eigen::Vector3d((u0 - cx) / cam.f, (v0 - cy) / cam.f, 1.0).normalized();
  cam.d1 = Eigen::Vector3d((u1 - cx) / cam.f, (v0 - cy) / cam.f, 1.0).normalized();
  cam.r3 = cam.d0.cross(cam.d1);

  // Pixels below the horizon must back-project to positive depth in front of
  // the camera: for a ray r below the horizon, the plane hit is at
  // t = -h / (r3 . r), so r3 . r must be negative.
  const Eigen::Vector3d probe(0.0, (v0 + 10.0 - cy) / cam.f, 1.0);
  if (cam.r3.dot(probe) > 0.0) cam.r3 = -cam.r3;

  Eigen::Matrix3d K;
  K << cam.f, 0, cx, 0, cam.f, cy, 0, 0, 1;
  Eigen::Matrix3d M;
  M.col(0) = cam.d0;
  M.col(1) = cam.d1;
  M.col(2) = -camera_height * cam.r3;
  cam.H = K * M;

  const double det = cam.H.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-12)
    throw SingularHomography("homography is singular (det = " +
                             std::to_string(det) + ")");
  cam.H_inv = cam.H.inverse();
  return cam;
}

PlanePoint image_to_world(const CameraModel& cam, const PixelPoint& p) {
  if (!(p.v >= cam.v0 + 0.5))
    throw HorizonOrAbove("pixel v=" + std::to_string(p.v) +
                         " is not at least 0.5 px below the horizon v0=" +
                         std::to_string(cam.v0));
  const Eigen::Vector3d w = cam.H_inv * Eigen::Vector3d(p.u, p.v, 1.0);
  if (std::abs(w.z()) < 1e-15)
    throw HorizonOrAbove("pixel maps to the plane at infinity");
  return PlanePoint{w.x() / w.z(), w.y() / w.z()};
}

double plane_depth(const CameraModel& cam, const PlanePoint& q) {
  const Eigen::Vector3d p_cam =
      q.x * cam.d0 + q.y * cam.d1 - cam.h * cam.r3;
  return p_cam.z();
}

PixelPoint world_to_image(const CameraModel& cam, const PlanePoint& q) {
  if (!(plane_depth(cam, q) > 0.0))
    throw BehindCamera("plane point has non-positive camera depth");
  const Eigen::Vector3d i = cam.H * Eigen::Vector3d(q.x, q.y, 1.0);
  return PixelPoint{i.x() / i.z(), i.y() / i.z()};
}

namespace {

// Row where the top of an object of height `tau` standing at the ground point
// that back-projects from `bottom` would appear, for candidate camera height h.
// Returns -inf-ish when the top lands behind the camera so bisection keeps a
// consistent sign.
double projected_top_row(const CameraModel& cam, const PixelPoint& bottom,
                         double tau, double h) {
  // Ground point scales linearly with h.
  const Eigen::Vector3d w = cam.H_inv * Eigen::Vector3d(bottom.u, bottom.v, 1.0);
  const double x1 = w.x() / w.z();
  const double y1 = w.y() / w.z();
  const double X = h * x1 / cam.h;
  const double Y = h * y1 / cam.h;
  const Eigen::Vector3d top_cam =
      X * cam.d0 + Y * cam.d1 + (tau - h) * cam.r3;
  if (!(top_cam.z() > 1e-12)) return -1e18;
  return cam.cy() + cam.f * top_cam.y() / top_cam.z();
}

}  // namespace

double estimate_height(const CameraModel& cam, const HeightObject& object) {
  if (!(object.physical_height > 0.0))
    throw InvalidObject("physical height must be positive");
  if (!(object.top.v < object.bottom.v))
    throw InvalidObject("object top must be strictly above its bottom");
  if (!(object.bottom.v >= cam.v0 + 0.5))
    throw InvalidObject("object bottom must sit below the horizon");

  const double tau = object.physical_height;
  double lo = 0.1, hi = 100.0;
  auto residual = [&](double h) {
    return projected_top_row(cam, object.bottom, tau, h) - object.top.v;
  };
  double rlo = residual(lo);
  double rhi = residual(hi);
  if (rlo == 0.0) return lo;
  if (rhi == 0.0) return hi;
  if ((rlo < 0) == (rhi < 0))
    throw NoConvergence("no height in [0.1, 100] matches the observed top row");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = residual(mid);
    if (std::abs(r) < 1e-6) return mid;
    if ((r < 0) == (rlo < 0)) {
      lo = mid;
      rlo = r;
    } else {
      hi = mid;
    }
  }
  throw NoConvergence("height bisection did not reach residual < 1e-6 px");
}

double estimate_height(const CameraModel& cam,
                       const std::vector<HeightObject>& objects) {
  if (objects.empty()) throw InvalidObject("no height objects supplied");
  double sum = 0;
  for (const auto& o : objects) sum += estimate_height(cam, o);
  return sum / static_cast<double>(objects.size());
}

UncertaintyReport position_uncertainty(const CameraModel& cam,
                                       const PixelPoint& p,
                                       const ParamDeltas& deltas) {
  const std::array<double, 4> delta{deltas.du0, deltas.dv0, deltas.du1,
                                    deltas.dh};
  for (const double d : delta)
    if (d < 0.0) throw Error("parameter deltas must be non-negative");

  const PlanePoint base = image_to_world(cam, p);
  const std::array<double, 4> value{cam.u0, cam.v0, cam.u1, cam.h};

  UncertaintyReport rep;
  for (int i = 0; i < 4; ++i) {
    const double step = std::max(1e-4, 1e-6 * std::abs(value[i]));
    auto perturbed = [&](double s) {
      std::array<double, 4> v = value;
      v[i] += s;
      const CameraModel c =
          build_camera(cam.image_width, cam.image_height, v[0], v[1], v[2], v[3]);
      return image_to_world(c, p);
    };
    const PlanePoint plus = perturbed(step);
    const PlanePoint minus = perturbed(-step);
    const double dXdp = (plus.x - minus.x) / (2.0 * step);
    const double dYdp = (plus.y - minus.y) / (2.0 * step);
    rep.contrib_dX[i] = std::abs(dXdp) * delta[i];
    rep.contrib_dY[i] = std::abs(dYdp) * delta[i];
    rep.dX += rep.contrib_dX[i];
    rep.dY += rep.contrib_dY[i];
  }
  if (std::abs(base.x) >= 1e-9) rep.rel_dX = rep.dX / std::abs(base.x);
  if (std::abs(base.y) >= 1e-9) rep.rel_dY = rep.dY / std::abs(base.y);
  return rep;
}

CameraModel load_camera_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DecodeError("bad camera JSON in " + path + ": " + e.what());
  }
  try {
    CameraModel cam = build_camera(j.at("image_width").get<int>(),
                                   j.at("image_height").get<int>(),
                                   j.at("u0").get<double>(),
                                   j.at("v0").get<double>(),
                                   j.at("u1").get<double>(),
                                   j.at("h").get<double>());
    cam.camera_id = j.value("camera_id", std::string{});
    return cam;
  } catch (const json::exception& e) {
    throw DecodeError("camera JSON missing fields in " + path + ": " + e.what());
  }
}

void save_camera_json(const CameraModel& cam, const std::string& path) {
  json j;
  j["camera_id"] = cam.camera_id;
  j["image_width"] = cam.image_width;
  j["image_height"] = cam.image_height;
  j["u0"] = cam.u0;
  j["v0"] = cam.v0;
  j["u1"] = cam.u1;
  j["h"] = cam.h;
  j["f"] = cam.f;
  std::vector<double> hrow;
  hrow.reserve(9);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) hrow.push_back(cam.H(r, c));
  j["H"] = hrow;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace streetscope
