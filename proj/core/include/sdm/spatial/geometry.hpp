#pragma once

#include <cmath>
#include <vector>

namespace sdm::spatial {

/// Planar location in projected meters (easting, northing).
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double squared_distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Every distance in the toolkit goes through this one expression so that
// index queries and scans agree bit-for-bit on boundary cases.
inline double distance(const Point& a, const Point& b) {
  return std::sqrt(squared_distance(a, b));
}

/// Simple polygon as a vertex ring (no repeated closing vertex).
using Polygon = std::vector<Point>;

/// Signed shoelace area; positive for counter-clockwise rings.
double signed_area(const Polygon& ring);
inline double area(const Polygon& ring) { return std::abs(signed_area(ring)); }

bool is_convex(const Polygon& ring);

/// Counter-clockwise convex hull (Andrew's monotone chain). Collinear points are dropped.
Polygon convex_hull(std::vector<Point> points);

/// Keeps the part of a convex polygon where a*x + b*y <= c.
Polygon clip_halfplane(const Polygon& convex, double a, double b, double c);

/// Inclusive point-in-polygon for convex counter-clockwise rings.
bool contains_convex(const Polygon& convex_ccw, const Point& p, double tolerance = 1e-9);

/// Outward offset of a convex polygon by `radius`, with corners approximated by
/// `arc_segments` chords per corner. The result contains the exact offset region's
/// polygonal inner approximation and stays convex.
Polygon buffer_convex(const Polygon& convex_ccw, double radius, int arc_segments = 8);

}  // namespace sdm::spatial
