#include "sdm/spatial/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace sdm::spatial {

double signed_area(const Polygon& ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  // Relative to the first vertex; absolute projected coordinates cancel badly.
  const Point& o = ring[0];
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double ax = ring[i].x - o.x, ay = ring[i].y - o.y;
    const double bx = ring[i + 1].x - o.x, by = ring[i + 1].y - o.y;
    twice += ax * by - bx * ay;
  }
  return 0.5 * twice;
}

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

bool is_convex(const Polygon& ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = cross(ring[i], ring[(i + 1) % n], ring[(i + 2) % n]);
    if (c == 0.0) continue;
    const int s = c > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    else if (s != sign) return false;
  }
  return sign != 0;
}

Polygon convex_hull(std::vector<Point> points) {
  std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;

  Polygon hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

Polygon clip_halfplane(const Polygon& convex, double a, double b, double c) {
  Polygon out;
  const std::size_t n = convex.size();
  if (n == 0) return out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = convex[i];
    const Point& q = convex[(i + 1) % n];
    const double fp = a * p.x + b * p.y - c;
    const double fq = a * q.x + b * q.y - c;
    if (fp <= 0) out.push_back(p);
    if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) {
      const double t = fp / (fp - fq);
      out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
    }
  }
  return out;
}

bool contains_convex(const Polygon& convex_ccw, const Point& p, double tolerance) {
  const std::size_t n = convex_ccw.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = convex_ccw[i];
    const Point& b = convex_ccw[(i + 1) % n];
    const double edge = std::hypot(b.x - a.x, b.y - a.y);
    if (cross(a, b, p) < -tolerance * std::max(1.0, edge)) return false;
  }
  return true;
}

Polygon buffer_convex(const Polygon& convex_ccw, double radius, int arc_segments) {
  const std::size_t n = convex_ccw.size();
  Polygon out;
  if (n == 0) return out;
  if (radius <= 0.0) return convex_ccw;
  out.reserve(n * static_cast<std::size_t>(arc_segments + 1));
  for (std::size_t i = 0; i < n; ++i) {
    const Point& prev = convex_ccw[(i + n - 1) % n];
    const Point& cur = convex_ccw[i];
    const Point& next = convex_ccw[(i + 1) % n];
    // Outward normals of the incoming and outgoing edges (ccw ring: right-hand side).
    const double a0 = std::atan2(cur.y - prev.y, cur.x - prev.x) - std::numbers::pi / 2;
    double a1 = std::atan2(next.y - cur.y, next.x - cur.x) - std::numbers::pi / 2;
    while (a1 < a0) a1 += 2 * std::numbers::pi;
    for (int s = 0; s <= arc_segments; ++s) {
      const double t = a0 + (a1 - a0) * s / arc_segments;
      out.push_back({cur.x + radius * std::cos(t), cur.y + radius * std::sin(t)});
    }
  }
  return convex_hull(std::move(out));
}

}  // namespace sdm::spatial
