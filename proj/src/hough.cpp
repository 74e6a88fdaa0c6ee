#include "streetscope/hough.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace streetscope {

namespace {

struct PixelXY {
  float x, y;
};

struct FitLine {
  // point + unit direction; normal distance = |(p - c) . n|
  double cx, cy, dx, dy;
  double dist(double px, double py) const {
    return std::abs((px - cx) * -dy + (py - cy) * dx);
  }
};

// Total least squares (principal axis) through a pixel set.
bool tls_fit(const std::vector<int>& idx, const std::vector<PixelXY>& px,
             FitLine& out) {
  const double n = static_cast<double>(idx.size());
  double sx = 0, sy = 0;
  for (const int i : idx) {
    sx += px[i].x;
    sy += px[i].y;
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const int i : idx) {
    const double ax = px[i].x - mx;
    const double ay = px[i].y - my;
    sxx += ax * ax;
    sxy += ax * ay;
    syy += ay * ay;
  }
  if (sxx + syy < 1e-12) return false;
  const double phi = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  out = {mx, my, std::cos(phi), std::sin(phi)};
  return true;
}

double normalize_angle(double a) {
  const double pi = std::numbers::pi;
  while (a < 0) a += pi;
  while (a >= pi) a -= pi;
  return a;
}

}  // namespace

std::vector<LineSegment> hough_lines(const EdgeMap& edges, double rho_res,
                                     double theta_res, int min_votes,
                                     double min_length, double max_gap) {
  if (!(rho_res > 0.0) || !(theta_res > 0.0))
    throw std::invalid_argument("hough resolutions must be positive");

  std::vector<PixelXY> px;
  for (int y = 0; y < edges.height; ++y)
    for (int x = 0; x < edges.width; ++x)
      if (edges.at(x, y))
        px.push_back({static_cast<float>(x), static_cast<float>(y)});

  std::vector<LineSegment> segments;
  if (px.empty()) return segments;

  const double pi = std::numbers::pi;
  const int n_theta = std::max(1, static_cast<int>(std::ceil(pi / theta_res)));
  const double diag = std::hypot(edges.width, edges.height);
  const int half_rho = static_cast<int>(std::ceil(diag / rho_res)) + 1;
  const int n_rho = 2 * half_rho + 1;

  std::vector<float> cos_t(n_theta), sin_t(n_theta);
  for (int k = 0; k < n_theta; ++k) {
    cos_t[k] = static_cast<float>(std::cos(k * theta_res));
    sin_t[k] = static_cast<float>(std::sin(k * theta_res));
  }

  std::vector<int> acc(static_cast<std::size_t>(n_theta) * n_rho, 0);
  auto rho_bin = [&](float x, float y, int k) {
    const double rho = x * cos_t[k] + y * sin_t[k];
    return static_cast<int>(std::lround(rho / rho_res)) + half_rho;
  };
  auto vote = [&](const PixelXY& p, int delta) {
    for (int k = 0; k < n_theta; ++k)
      acc[static_cast<std::size_t>(k) * n_rho + rho_bin(p.x, p.y, k)] += delta;
  };

  for (const auto& p : px) vote(p, 1);
  std::vector<char> alive(px.size(), 1);

  std::vector<int> member;
  for (;;) {
    // Global accumulator peak; ties break on lowest (theta, rho) bin.
    int best_votes = 0;
    int best_k = -1, best_r = -1;
    for (int k = 0; k < n_theta; ++k)
      for (int r = 0; r < n_rho; ++r) {
        const int v = acc[static_cast<std::size_t>(k) * n_rho + r];
        if (v > best_votes) {
          best_votes = v;
          best_k = k;
          best_r = r;
        }
      }
    if (best_votes < std::max(1, min_votes)) break;

    const double theta = best_k * theta_res;
    const double rho = static_cast<double>(best_r - half_rho) * rho_res;
    FitLine line{rho * std::cos(theta), rho * std::sin(theta),
                 -std::sin(theta), std::cos(theta)};

    member.clear();
    for (std::size_t i = 0; i < px.size(); ++i)
      if (alive[i] && line.dist(px[i].x, px[i].y) <= rho_res)
        member.push_back(static_cast<int>(i));
    if (member.empty()) {
      // Accumulator bin held only quantization strays; zero it and move on.
      acc[static_cast<std::size_t>(best_k) * n_rho + best_r] = 0;
      continue;
    }

    // Refit; keep the refit only if it still covers every member pixel.
    FitLine refit;
    if (tls_fit(member, px, refit)) {
      bool covers = true;
      for (const int i : member)
        if (refit.dist(px[i].x, px[i].y) > rho_res) {
          covers = false;
          break;
        }
      if (covers) line = refit;
    }

    // Order member pixels along the line and split at gaps.
    std::vector<std::pair<double, int>> proj;
    proj.reserve(member.size());
    for (const int i : member)
      proj.emplace_back(px[i].x * line.dx + px[i].y * line.dy, i);
    std::sort(proj.begin(), proj.end());

    std::size_t run_begin = 0;
    for (std::size_t j = 1; j <= proj.size(); ++j) {
      const bool split =
          j == proj.size() || proj[j].first - proj[j - 1].first > max_gap;
      if (!split) continue;
      const double t0 = proj[run_begin].first;
      const double t1 = proj[j - 1].first;
      const std::size_t count = j - run_begin;
      if (t1 - t0 >= min_length && count >= static_cast<std::size_t>(min_votes)) {
        LineSegment seg;
        const double ref = line.cx * line.dx + line.cy * line.dy;
        seg.p_start = {line.cx + (t0 - ref) * line.dx,
                       line.cy + (t0 - ref) * line.dy};
        seg.p_end = {line.cx + (t1 - ref) * line.dx,
                     line.cy + (t1 - ref) * line.dy};
        seg.angle = normalize_angle(
            std::atan2(seg.p_end.v - seg.p_start.v, seg.p_end.u - seg.p_start.u));
        seg.length = t1 - t0;
        seg.support = static_cast<int>(count);
        segments.push_back(seg);
      }
      run_begin = j;
    }

    // Retire this line's support before hunting the next peak.
    for (const int i : member) {
      alive[i] = 0;
      vote(px[i], -1);
    }
  }
  return segments;
}

OrthogonalLineSets split_orthogonal_sets(const std::vector<LineSegment>& lines,
                                         double horizon_band,
                                         double angle_split) {
  const double pi = std::numbers::pi;
  if (!(angle_split > 0.0) || !(angle_split < pi / 2))
    throw std::invalid_argument("angle_split must lie in (0, pi/2)");
  OrthogonalLineSets out;
  for (const auto& seg : lines) {
    if (std::max(seg.p_start.v, seg.p_end.v) < horizon_band) continue;
    if (angle_from_horizontal(seg.angle) <= angle_split)
      out.road_perpendiculars.push_back(seg);
    else
      out.road_edges.push_back(seg);
  }
  return out;
}

}  // namespace streetscope
