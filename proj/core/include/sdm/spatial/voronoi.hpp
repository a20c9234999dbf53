#pragma once

#include <optional>
#include <vector>

#include "sdm/spatial/geometry.hpp"

namespace sdm::spatial {

struct VoronoiPartition {
  std::vector<Polygon> cells;     // one ccw ring per station, meters
  std::vector<double> areas_km2;  // per cell
  Polygon boundary;               // convex clipping ring
  bool default_boundary = false;  // true when the buffered-hull fallback was used
  double boundary_buffer_m = 0.0; // outward buffer applied to the hull (fallback only)
};

/// Default clipping extent: the stations' convex hull pushed outward by the
/// 95th percentile of nearest-neighbour distances.
Polygon default_boundary(const std::vector<Point>& stations, double* buffer_out = nullptr);

/// Voronoi cells clipped to a convex boundary. Requires >= 3 distinct,
/// non-collinear stations, all inside the boundary. Duplicate coordinates are
/// reported by station position.
VoronoiPartition build_voronoi(const std::vector<Point>& stations,
                               const std::optional<Polygon>& boundary = std::nullopt);

}  // namespace sdm::spatial
