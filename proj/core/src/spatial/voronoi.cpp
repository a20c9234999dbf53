#include "sdm/spatial/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "sdm/error.hpp"
#include "sdm/spatial/spatial_index.hpp"

namespace sdm::spatial {

namespace {

void check_duplicates(const std::vector<Point>& stations) {
  std::map<std::pair<double, double>, std::size_t> seen;
  std::ostringstream dups;
  bool any = false;
  for (std::size_t i = 0; i < stations.size(); ++i) {
    auto [it, inserted] = seen.emplace(std::make_pair(stations[i].x, stations[i].y), i);
    if (!inserted) {
      dups << (any ? ", " : "") << it->second << "=" << i;
      any = true;
    }
  }
  if (any) fail(ErrorCode::duplicate_points, "duplicate station coordinates: " + dups.str());
}

Polygon make_ccw(Polygon ring) {
  if (signed_area(ring) < 0) std::reverse(ring.begin(), ring.end());
  return ring;
}

}  // namespace

Polygon default_boundary(const std::vector<Point>& stations, double* buffer_out) {
  require(stations.size() >= 3, ErrorCode::invalid_argument, "need at least 3 stations");
  SpatialIndex index(stations);
  std::vector<double> nn;
  nn.reserve(stations.size());
  for (const auto& s : stations) {
    const auto hits = index.knn(s, 2);
    nn.push_back(hits.size() > 1 ? hits[1].distance : 0.0);
  }
  std::sort(nn.begin(), nn.end());
  const double rank = 0.95 * static_cast<double>(nn.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, nn.size() - 1);
  const double buffer = nn[lo] + (rank - static_cast<double>(lo)) * (nn[hi] - nn[lo]);
  if (buffer_out) *buffer_out = buffer;
  return buffer_convex(convex_hull(stations), buffer);
}

VoronoiPartition build_voronoi(const std::vector<Point>& stations,
                               const std::optional<Polygon>& boundary) {
  require(stations.size() >= 3, ErrorCode::invalid_argument,
          "Voronoi partition needs at least 3 stations");
  check_duplicates(stations);
  if (convex_hull(stations).size() < 3) {
    fail(ErrorCode::invalid_argument, "Voronoi partition needs non-collinear stations");
  }

  VoronoiPartition out;
  if (boundary) {
    require(is_convex(*boundary), ErrorCode::invalid_argument,
            "Voronoi clipping boundary must be a convex polygon");
    out.boundary = make_ccw(*boundary);
  } else {
    out.boundary = default_boundary(stations, &out.boundary_buffer_m);
    out.default_boundary = true;
  }
  for (std::size_t i = 0; i < stations.size(); ++i) {
    if (!contains_convex(out.boundary, stations[i])) {
      std::ostringstream msg;
      msg << "station " << i << " lies outside the clipping boundary";
      fail(ErrorCode::invalid_argument, msg.str());
    }
  }

  SpatialIndex index(stations);
  const std::size_t n = stations.size();
  out.cells.resize(n);
  out.areas_km2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point origin = stations[i];
    // Work in a frame centred on the station to limit cancellation with large
    // projected coordinates.
    Polygon cell;
    cell.reserve(out.boundary.size());
    for (const auto& v : out.boundary) cell.push_back({v.x - origin.x, v.y - origin.y});

    std::size_t batch = std::min<std::size_t>(n, 16);
    std::size_t done = 1;  // position 0 is the station itself
    for (;;) {
      const auto nn = index.knn(origin, batch);
      bool finished = false;
      for (std::size_t pos = done; pos < nn.size(); ++pos) {
        double reach2 = 0.0;
        for (const auto& v : cell) reach2 = std::max(reach2, v.x * v.x + v.y * v.y);
        const double d = nn[pos].distance;
        if (d * d > 4.0 * reach2) {
          finished = true;
          break;
        }
        const Point& s = stations[nn[pos].id];
        const double ax = s.x - origin.x;
        const double ay = s.y - origin.y;
        // |p|^2 <= |p - a|^2  <=>  2 a.p <= |a|^2
        cell = clip_halfplane(cell, 2 * ax, 2 * ay, ax * ax + ay * ay);
        if (cell.empty()) break;
      }
      done = nn.size();
      if (finished || done >= n || cell.empty()) break;
      batch = std::min(n, batch * 4);
    }
    out.areas_km2[i] = area(cell) / 1e6;
    for (auto& v : cell) {
      v.x += origin.x;
      v.y += origin.y;
    }
    out.cells[i] = std::move(cell);
  }
  return out;
}

}  // namespace sdm::spatial
