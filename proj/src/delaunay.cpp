#include "streetscope/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace streetscope {

namespace {

struct Vec2 {
  double x, y;
};

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// Incircle determinant with a scale-aware tolerance; near-cocircular points
// count as outside, which keeps ties (e.g. the unit square) a valid
// triangulation with either diagonal.
bool strictly_inside_circumcircle(const Vec2& a, const Vec2& b, const Vec2& c,
                                  const Vec2& p) {
  const double adx = a.x - p.x, ady = a.y - p.y;
  const double bdx = b.x - p.x, bdy = b.y - p.y;
  const double cdx = c.x - p.x, cdy = c.y - p.y;
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  const double det = adx * (bdy * cd - bd * cdy) -
                     ady * (bdx * cd - bd * cdx) +
                     ad * (bdx * cdy - bdy * cdx);
  const double mag = std::abs(adx) * (std::abs(bdy) * cd + bd * std::abs(cdy)) +
                     std::abs(ady) * (std::abs(bdx) * cd + bd * std::abs(cdx)) +
                     ad * (std::abs(bdx) * std::abs(cdy) +
                           std::abs(bdy) * std::abs(cdx));
  return det > 1e-12 * mag;
}

struct Tri {
  int v[3];  // ccw in local coords
};

}  // namespace

double incircle(const BngPoint& a, const BngPoint& b, const BngPoint& c,
                const BngPoint& p) {
  const double adx = a.easting - p.easting, ady = a.northing - p.northing;
  const double bdx = b.easting - p.easting, bdy = b.northing - p.northing;
  const double cdx = c.easting - p.easting, cdy = c.northing - p.northing;
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
         ad * (bdx * cdy - bdy * cdx);
}

Triangulation delaunay(const std::vector<BngPoint>& input) {
  Triangulation out;
  out.vertex_of_input.reserve(input.size());

  std::map<std::pair<double, double>, int> seen;
  for (const auto& p : input) {
    const auto key = std::make_pair(p.easting, p.northing);
    auto it = seen.find(key);
    if (it == seen.end()) {
      const int id = static_cast<int>(out.points.size());
      seen.emplace(key, id);
      out.points.push_back(p);
      out.vertex_of_input.push_back(id);
    } else {
      out.vertex_of_input.push_back(it->second);
    }
  }

  const int n = static_cast<int>(out.points.size());
  if (n <= 1) return out;

  // Local frame: translate to the bounding-box centre.
  double min_x = out.points[0].easting, max_x = min_x;
  double min_y = out.points[0].northing, max_y = min_y;
  for (const auto& p : out.points) {
    min_x = std::min(min_x, p.easting);
    max_x = std::max(max_x, p.easting);
    min_y = std::min(min_y, p.northing);
    max_y = std::max(max_y, p.northing);
  }
  const double cx = 0.5 * (min_x + max_x);
  const double cy = 0.5 * (min_y + max_y);
  std::vector<Vec2> pts(n);
  for (int i = 0; i < n; ++i)
    pts[i] = {out.points[i].easting - cx, out.points[i].northing - cy};

  const double span = std::max({max_x - min_x, max_y - min_y, 1e-9});

  // Collinearity: max perpendicular deviation from the widest chord.
  auto chain_edges = [&]() {
    int a = 0, b = 1;
    double best = -1;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double d = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
        if (d > best) {
          best = d;
          a = i;
          b = j;
        }
      }
    const double dx = (pts[b].x - pts[a].x) / best;
    const double dy = (pts[b].y - pts[a].y) / best;
    std::vector<std::pair<double, int>> order;
    order.reserve(n);
    for (int i = 0; i < n; ++i)
      order.emplace_back(pts[i].x * dx + pts[i].y * dy, i);
    std::sort(order.begin(), order.end());
    for (int i = 0; i + 1 < n; ++i) {
      int u = order[i].second, v = order[i + 1].second;
      if (u > v) std::swap(u, v);
      out.edges.push_back({u, v});
    }
    std::sort(out.edges.begin(), out.edges.end());
  };

  if (n == 2) {
    chain_edges();
    return out;
  }
  {
    int a = 0, b = 1;
    double best = -1;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double d = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
        if (d > best) {
          best = d;
          a = i;
          b = j;
        }
      }
    double max_perp = 0;
    for (int i = 0; i < n; ++i) {
      const double cross = std::abs(orient(pts[a], pts[b], pts[i])) / best;
      max_perp = std::max(max_perp, cross);
    }
    if (max_perp <= 1e-9 * span) {
      chain_edges();
      return out;
    }
  }

  // Bowyer-Watson. Super-triangle comfortably containing the data.
  const double r = 32.0 * span;
  std::vector<Vec2> all = pts;
  all.push_back({-r, -r});
  all.push_back({r, -r});
  all.push_back({0, r});
  const int s0 = n, s1 = n + 1, s2 = n + 2;

  std::vector<Tri> tris;
  tris.push_back({{s0, s1, s2}});  // ccw

  std::vector<char> bad;
  for (int pi = 0; pi < n; ++pi) {
    const Vec2& p = all[pi];
    bad.assign(tris.size(), 0);
    // Boundary of the union of bad triangles = edges seen exactly once.
    std::map<std::pair<int, int>, std::pair<int, int>> boundary;  // sorted -> oriented
    bool any_bad = false;
    for (std::size_t t = 0; t < tris.size(); ++t) {
      const Tri& tr = tris[t];
      if (strictly_inside_circumcircle(all[tr.v[0]], all[tr.v[1]],
                                       all[tr.v[2]], p)) {
        bad[t] = 1;
        any_bad = true;
        for (int e = 0; e < 3; ++e) {
          const int u = tr.v[e];
          const int v = tr.v[(e + 1) % 3];
          const auto key = std::minmax(u, v);
          auto it = boundary.find(key);
          if (it == boundary.end())
            boundary.emplace(key, std::make_pair(u, v));
          else
            boundary.erase(it);  // shared edge, interior to the cavity
        }
      }
    }
    if (!any_bad) {
      // Tolerance classified the point as on/outside every circumcircle;
      // fall back to splitting the containing triangle.
      for (std::size_t t = 0; t < tris.size(); ++t) {
        const Tri& tr = tris[t];
        if (orient(all[tr.v[0]], all[tr.v[1]], p) >= 0 &&
            orient(all[tr.v[1]], all[tr.v[2]], p) >= 0 &&
            orient(all[tr.v[2]], all[tr.v[0]], p) >= 0) {
          bad[t] = 1;
          for (int e = 0; e < 3; ++e) {
            const int u = tr.v[e];
            const int v = tr.v[(e + 1) % 3];
            boundary.emplace(std::minmax(u, v), std::make_pair(u, v));
          }
          break;
        }
      }
    }

    std::vector<Tri> next;
    next.reserve(tris.size() + 2);
    for (std::size_t t = 0; t < tris.size(); ++t)
      if (!bad[t]) next.push_back(tris[t]);
    for (const auto& [key, oriented] : boundary) {
      Tri nt{{oriented.first, oriented.second, pi}};
      if (orient(all[nt.v[0]], all[nt.v[1]], all[nt.v[2]]) < 0)
        std::swap(nt.v[1], nt.v[2]);
      next.push_back(nt);
    }
    tris.swap(next);
  }

  std::set<std::array<int, 2>> edge_set;
  for (const auto& tr : tris) {
    if (tr.v[0] >= n || tr.v[1] >= n || tr.v[2] >= n) continue;
    std::array<int, 3> t{tr.v[0], tr.v[1], tr.v[2]};
    std::sort(t.begin(), t.end());
    out.triangles.push_back(t);
    edge_set.insert({t[0], t[1]});
    edge_set.insert({t[0], t[2]});
    edge_set.insert({t[1], t[2]});
  }
  std::sort(out.triangles.begin(), out.triangles.end());

  // Safety net for near-degenerate inputs: a vertex left without any real
  // edge is linked to its nearest neighbour (a Delaunay edge in exact math).
  std::vector<char> covered(n, 0);
  for (const auto& e : edge_set) {
    covered[e[0]] = 1;
    covered[e[1]] = 1;
  }
  for (int i = 0; i < n; ++i) {
    if (covered[i]) continue;
    int nearest = -1;
    double best = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
      if (nearest < 0 || d < best) {
        best = d;
        nearest = j;
      }
    }
    if (nearest >= 0)
      edge_set.insert({std::min(i, nearest), std::max(i, nearest)});
  }

  out.edges.assign(edge_set.begin(), edge_set.end());
  return out;
}

}  // namespace streetscope
