#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sdm/spatial/geometry.hpp"
#include "sdm/spatial/kernel.hpp"

namespace sdm::spatial {

struct Neighbor {
  std::size_t id = 0;
  double distance = 0.0;
};

/// Static 2-d tree over points with stable ids (their input positions).
/// Every query orders results by (distance, id), so equidistant points
/// always come back lowest id first.
class SpatialIndex {
 public:
  SpatialIndex() = default;
  explicit SpatialIndex(std::vector<Point> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point& point(std::size_t id) const { return points_[id]; }
  const std::vector<Point>& points() const { return points_; }

  /// Exactly min(k, size()) neighbours in non-decreasing distance.
  std::vector<Neighbor> knn(const Point& query, std::size_t k) const;
  Neighbor nearest(const Point& query) const;
  /// All points with distance <= radius (closed ball).
  std::vector<Neighbor> within(const Point& query, double radius) const;

 private:
  struct Node {
    double lo_x, lo_y, hi_x, hi_y;
    std::size_t begin, end;  // range into order_
    int left = -1, right = -1;
  };

  int build(std::size_t begin, std::size_t end, int depth);
  void knn_search(int node, const Point& q, std::size_t k, std::vector<Neighbor>& heap,
                  std::vector<double>& heap_d2) const;
  void radius_search(int node, const Point& q, double radius, double r2,
                     std::vector<Neighbor>& out) const;

  std::vector<Point> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

/// Neighbourhood radius at `at`: the fixed distance, or the distance to the
/// k-th nearest indexed point. When `at` coincides with an indexed point, that
/// one point is skipped. If fewer than k other points exist the farthest one
/// is used. Throws when adaptive k exceeds the index size.
double resolve_bandwidth(const SpatialIndex& index, const Point& at, const Bandwidth& spec);

enum class Aggregation { sum, mean, count };

/// Aggregates values of indexed points with distance <= radius from center.
/// Mean over an empty buffer throws ErrorCode::empty_buffer.
double buffer_aggregate(const SpatialIndex& index, std::span<const double> values,
                        const Point& center, double radius, Aggregation agg);

/// For each source, the id of its nearest target (ties to the lowest id).
std::vector<std::size_t> nearest_join(std::span<const Point> sources, const SpatialIndex& targets);

}  // namespace sdm::spatial
