#include "streetscope/registration.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "streetscope/errors.hpp"
#include "streetscope/rng.hpp"

namespace streetscope {

namespace {

using json = nlohmann::ordered_json;

std::vector<PlanePoint> anchors_to_plane(const std::vector<Anchor>& anchors,
                                         const CameraModel& cam) {
  std::vector<PlanePoint> plane;
  plane.reserve(anchors.size());
  for (const auto& a : anchors) plane.push_back(image_to_world(cam, a.pixel));
  return plane;
}

}  // namespace

void decompose_affine(double a11, double a12, double a21, double a22,
                      double& theta, double& k1, double& k2, double& k3,
                      double& k4) {
  const double pi = std::numbers::pi;
  theta = std::atan2(a12 - a21, a11 + a22);
  double s = std::sin(theta);
  double c = std::cos(theta);
  // The paper's five symbols over-parameterize a 2x2 block, so any theta with
  // usable sin/cos reconstructs exactly; fall back to pi/4 when the natural
  // angle would zero a factor that still has to carry a nonzero entry.
  const bool sin_bad = std::abs(s) < 1e-9 && (std::abs(a12) > 1e-9 || std::abs(a21) > 1e-9);
  const bool cos_bad = std::abs(c) < 1e-9 && (std::abs(a11) > 1e-9 || std::abs(a22) > 1e-9);
  if (sin_bad || cos_bad) {
    theta = pi / 4;
    s = std::sin(theta);
    c = std::cos(theta);
  }
  if (std::abs(s) >= 1e-9) {
    k3 = a12 / s;
    k2 = -a21 / s;
  } else {
    k3 = 0;
    k2 = 0;
  }
  if (std::abs(c) >= 1e-9) {
    k1 = a11 / c;
    k4 = a22 / c;
  } else {
    k1 = 0;
    k4 = 0;
  }
}

RegistrationTransform fit_registration(const std::vector<Anchor>& anchors,
                                       const CameraModel& cam) {
  if (anchors.size() < 4)
    throw TooFewAnchors("registration needs >= 4 anchors, got " +
                        std::to_string(anchors.size()));
  const auto plane = anchors_to_plane(anchors, cam);
  const double n = static_cast<double>(anchors.size());

  PlanePoint mean_in{0, 0};
  BngPoint mean_out{0, 0};
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    mean_in.x += plane[i].x;
    mean_in.y += plane[i].y;
    mean_out.easting += anchors[i].bng.easting;
    mean_out.northing += anchors[i].bng.northing;
  }
  mean_in.x /= n;
  mean_in.y /= n;
  mean_out.easting /= n;
  mean_out.northing /= n;

  // Centered least squares: A = B S^-1, t = mean_out - A mean_in.
  double sxx = 0, sxy = 0, syy = 0;
  double bex = 0, bey = 0, bnx = 0, bny = 0;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const double x = plane[i].x - mean_in.x;
    const double y = plane[i].y - mean_in.y;
    const double e = anchors[i].bng.easting - mean_out.easting;
    const double nn = anchors[i].bng.northing - mean_out.northing;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    bex += e * x;
    bey += e * y;
    bnx += nn * x;
    bny += nn * y;
  }
  const double det = sxx * syy - sxy * sxy;
  const double scale = sxx + syy;
  if (!(scale > 0.0) || std::abs(det) <= 1e-12 * scale * scale)
    throw DegenerateConfiguration(
        "anchor plane points are collinear or coincident");

  RegistrationTransform t;
  t.a11 = (bex * syy - bey * sxy) / det;
  t.a12 = (bey * sxx - bex * sxy) / det;
  t.a21 = (bnx * syy - bny * sxy) / det;
  t.a22 = (bny * sxx - bnx * sxy) / det;
  t.tx = mean_out.easting - (t.a11 * mean_in.x + t.a12 * mean_in.y);
  t.ty = mean_out.northing - (t.a21 * mean_in.x + t.a22 * mean_in.y);
  t.degenerate = std::abs(t.a11 * t.a22 - t.a12 * t.a21) <= 1e-12;
  decompose_affine(t.a11, t.a12, t.a21, t.a22, t.theta, t.k1, t.k2, t.k3, t.k4);

  t.residuals.reserve(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const BngPoint fit = apply_registration(t, plane[i]);
    t.residuals.push_back({fit.easting - anchors[i].bng.easting,
                           fit.northing - anchors[i].bng.northing});
  }
  return t;
}

BngPoint apply_registration(const RegistrationTransform& t, const PlanePoint& q) {
  return BngPoint{t.a11 * q.x + t.a12 * q.y + t.tx,
                  t.a21 * q.x + t.a22 * q.y + t.ty};
}

PairwiseError pairwise_distance_error(const std::vector<Anchor>& anchors,
                                      const RegistrationTransform& t,
                                      const CameraModel& cam) {
  if (anchors.size() < 2)
    throw TooFewAnchors("pairwise error needs >= 2 anchors");
  const auto plane = anchors_to_plane(anchors, cam);
  std::vector<BngPoint> mapped;
  mapped.reserve(plane.size());
  for (const auto& q : plane) mapped.push_back(apply_registration(t, q));

  double sum = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < anchors.size(); ++i)
    for (std::size_t j = i + 1; j < anchors.size(); ++j) {
      const double truth = distance(anchors[i].bng, anchors[j].bng);
      const double fit = distance(mapped[i], mapped[j]);
      sum += (truth - fit) * (truth - fit);
      ++pairs;
    }
  PairwiseError err;
  err.epsilon = sum / static_cast<double>(pairs);
  err.rmse = std::sqrt(err.epsilon);
  return err;
}

ValidationReport leave_one_out(const std::vector<SceneAnchors>& scenes,
                               std::uint64_t seed) {
  for (const auto& s : scenes)
    if (s.anchors.size() < 5)
      throw TooFewAnchors(
          "leave-one-out needs >= 5 anchors per scene so the reduced set "
          "still has >= 4");
  if (scenes.empty()) throw TooFewAnchors("no scenes");

  Rng rng(seed);
  ValidationReport rep;
  rep.seed = seed;
  double holdout_sum = 0;
  double insample_sum = 0;
  for (const auto& scene : scenes) {
    const std::size_t drop = rng.below(scene.anchors.size());
    std::vector<Anchor> reduced;
    reduced.reserve(scene.anchors.size() - 1);
    for (std::size_t i = 0; i < scene.anchors.size(); ++i)
      if (i != drop) reduced.push_back(scene.anchors[i]);

    const RegistrationTransform part = fit_registration(reduced, scene.cam);
    const Anchor& held = scene.anchors[drop];
    const BngPoint predicted =
        apply_registration(part, image_to_world(scene.cam, held.pixel));
    const double err = distance(predicted, held.bng);
    rep.per_scene_holdout.push_back(err);
    holdout_sum += err;

    const RegistrationTransform full = fit_registration(scene.anchors, scene.cam);
    insample_sum += pairwise_distance_error(scene.anchors, full, scene.cam).rmse;
  }
  const double n = static_cast<double>(scenes.size());
  rep.holdout_error = holdout_sum / n;
  rep.in_sample_error = insample_sum / n;
  rep.discrepancy = std::abs(rep.holdout_error - rep.in_sample_error);
  return rep;
}

std::vector<Anchor> load_anchors_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DecodeError("bad anchors JSON in " + path + ": " + e.what());
  }
  if (!j.is_array()) throw DecodeError("anchors JSON must be an array");
  std::vector<Anchor> anchors;
  for (const auto& item : j) {
    try {
      Anchor a;
      a.id = item.at("id").get<std::string>();
      a.pixel = {item.at("u").get<double>(), item.at("v").get<double>()};
      a.bng = {item.at("easting").get<double>(),
               item.at("northing").get<double>()};
      a.label = item.value("label", std::string{});
      anchors.push_back(std::move(a));
    } catch (const json::exception& e) {
      throw DecodeError("anchor entry missing fields: " + std::string(e.what()));
    }
  }
  return anchors;
}

void save_registration_json(const RegistrationTransform& t,
                            const PairwiseError& err, const std::string& path) {
  json j;
  j["a11"] = t.a11;
  j["a12"] = t.a12;
  j["a21"] = t.a21;
  j["a22"] = t.a22;
  j["tx"] = t.tx;
  j["ty"] = t.ty;
  j["theta"] = t.theta;
  j["k1"] = t.k1;
  j["k2"] = t.k2;
  j["k3"] = t.k3;
  j["k4"] = t.k4;
  j["degenerate"] = t.degenerate;
  json res = json::array();
  for (const auto& e : t.residuals) res.push_back({e[0], e[1]});
  j["residuals"] = res;
  j["epsilon"] = err.epsilon;
  j["rmse"] = err.rmse;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
}

RegistrationTransform load_registration_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DecodeError("bad registration JSON in " + path + ": " + e.what());
  }
  try {
    RegistrationTransform t;
    t.a11 = j.at("a11").get<double>();
    t.a12 = j.at("a12").get<double>();
    t.a21 = j.at("a21").get<double>();
    t.a22 = j.at("a22").get<double>();
    t.tx = j.at("tx").get<double>();
    t.ty = j.at("ty").get<double>();
    t.degenerate = j.value("degenerate", false);
    decompose_affine(t.a11, t.a12, t.a21, t.a22, t.theta, t.k1, t.k2, t.k3,
                     t.k4);
    return t;
  } catch (const json::exception& e) {
    throw DecodeError("registration JSON missing fields: " +
                      std::string(e.what()));
  }
}

}  // namespace streetscope
