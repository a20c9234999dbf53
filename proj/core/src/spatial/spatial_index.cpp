#include "sdm/spatial/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "sdm/error.hpp"

namespace sdm::spatial {

namespace {

constexpr std::size_t kLeafSize = 12;

bool before(double d2a, std::size_t ida, double d2b, std::size_t idb) {
  return d2a < d2b || (d2a == d2b && ida < idb);
}

}  // namespace

SpatialIndex::SpatialIndex(std::vector<Point> points) : points_(std::move(points)) {
  for (const auto& p : points_) {
    require(std::isfinite(p.x) && std::isfinite(p.y), ErrorCode::invalid_argument,
            "spatial index received a non-finite coordinate");
  }
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, points_.size(), 0);
  }
}

int SpatialIndex::build(std::size_t begin, std::size_t end, int depth) {
  Node node{};
  node.lo_x = node.lo_y = std::numeric_limits<double>::infinity();
  node.hi_x = node.hi_y = -std::numeric_limits<double>::infinity();
  for (std::size_t i = begin; i < end; ++i) {
    const Point& p = points_[order_[i]];
    node.lo_x = std::min(node.lo_x, p.x);
    node.lo_y = std::min(node.lo_y, p.y);
    node.hi_x = std::max(node.hi_x, p.x);
    node.hi_y = std::max(node.hi_y, p.y);
  }
  node.begin = begin;
  node.end = end;
  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return index;

  const bool split_x = (node.hi_x - node.lo_x) >= (node.hi_y - node.lo_y);
  (void)depth;
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) {
                     const double va = split_x ? points_[a].x : points_[a].y;
                     const double vb = split_x ? points_[b].x : points_[b].y;
                     return va < vb || (va == vb && a < b);
                   });
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  nodes_[static_cast<std::size_t>(index)].left = left;
  nodes_[static_cast<std::size_t>(index)].right = right;
  return index;
}

namespace {

double box_d2(double lo_x, double lo_y, double hi_x, double hi_y, const Point& q) {
  const double dx = q.x < lo_x ? lo_x - q.x : (q.x > hi_x ? q.x - hi_x : 0.0);
  const double dy = q.y < lo_y ? lo_y - q.y : (q.y > hi_y ? q.y - hi_y : 0.0);
  return dx * dx + dy * dy;
}

}  // namespace

void SpatialIndex::knn_search(int node_id, const Point& q, std::size_t k,
                              std::vector<Neighbor>& heap, std::vector<double>& heap_d2) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  const double bd2 = box_d2(node.lo_x, node.lo_y, node.hi_x, node.hi_y, q);
  if (heap.size() == k && bd2 > heap_d2.front()) return;

  // heap_d2 mirrors heap so the max-heap comparator can look distances up by position.
  auto push = [&](std::size_t id, double d2) {
    if (heap.size() == k) {
      if (!before(d2, id, heap_d2.front(), heap.front().id)) return;
      // pop max
      std::size_t last = heap.size() - 1;
      std::swap(heap[0], heap[last]);
      std::swap(heap_d2[0], heap_d2[last]);
      heap.pop_back();
      heap_d2.pop_back();
      // sift down
      std::size_t i = 0;
      for (;;) {
        std::size_t l = 2 * i + 1, r = l + 1, m = i;
        if (l < heap.size() && before(heap_d2[m], heap[m].id, heap_d2[l], heap[l].id)) m = l;
        if (r < heap.size() && before(heap_d2[m], heap[m].id, heap_d2[r], heap[r].id)) m = r;
        if (m == i) break;
        std::swap(heap[i], heap[m]);
        std::swap(heap_d2[i], heap_d2[m]);
        i = m;
      }
    }
    heap.push_back({id, 0.0});
    heap_d2.push_back(d2);
    std::size_t i = heap.size() - 1;
    while (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (!before(heap_d2[parent], heap[parent].id, heap_d2[i], heap[i].id)) break;
      std::swap(heap[i], heap[parent]);
      std::swap(heap_d2[i], heap_d2[parent]);
      i = parent;
    }
  };

  if (node.left < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const std::size_t id = order_[i];
      push(id, squared_distance(points_[id], q));
    }
    return;
  }
  const Node& l = nodes_[static_cast<std::size_t>(node.left)];
  const Node& r = nodes_[static_cast<std::size_t>(node.right)];
  const double dl = box_d2(l.lo_x, l.lo_y, l.hi_x, l.hi_y, q);
  const double dr = box_d2(r.lo_x, r.lo_y, r.hi_x, r.hi_y, q);
  if (dl <= dr) {
    knn_search(node.left, q, k, heap, heap_d2);
    knn_search(node.right, q, k, heap, heap_d2);
  } else {
    knn_search(node.right, q, k, heap, heap_d2);
    knn_search(node.left, q, k, heap, heap_d2);
  }
}

std::vector<Neighbor> SpatialIndex::knn(const Point& query, std::size_t k) const {
  k = std::min(k, points_.size());
  std::vector<Neighbor> heap;
  std::vector<double> heap_d2;
  if (k == 0) return heap;
  heap.reserve(k + 1);
  heap_d2.reserve(k + 1);
  knn_search(0, query, k, heap, heap_d2);

  std::vector<std::size_t> pos(heap.size());
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  std::sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) {
    return before(heap_d2[a], heap[a].id, heap_d2[b], heap[b].id);
  });
  std::vector<Neighbor> out;
  out.reserve(heap.size());
  for (std::size_t p : pos) out.push_back({heap[p].id, std::sqrt(heap_d2[p])});
  return out;
}

Neighbor SpatialIndex::nearest(const Point& query) const {
  require(!points_.empty(), ErrorCode::invalid_argument, "nearest query on an empty index");
  return knn(query, 1).front();
}

void SpatialIndex::radius_search(int node_id, const Point& q, double radius, double r2,
                                 std::vector<Neighbor>& out) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (box_d2(node.lo_x, node.lo_y, node.hi_x, node.hi_y, q) > r2) return;
  if (node.left < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const std::size_t id = order_[i];
      const double d = distance(points_[id], q);
      if (d <= radius) out.push_back({id, d});
    }
    return;
  }
  radius_search(node.left, q, radius, r2, out);
  radius_search(node.right, q, radius, r2, out);
}

std::vector<Neighbor> SpatialIndex::within(const Point& query, double radius) const {
  std::vector<Neighbor> out;
  if (points_.empty() || !(radius >= 0.0)) return out;
  // Pad the pruning radius so that sqrt rounding never drops a boundary point.
  const double padded = radius * (1.0 + 1e-12) + 1e-300;
  radius_search(0, query, radius, padded * padded, out);
  std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
  });
  return out;
}

double resolve_bandwidth(const SpatialIndex& index, const Point& at, const Bandwidth& spec) {
  if (spec.is_fixed()) {
    require(spec.distance > 0.0, ErrorCode::invalid_bandwidth, "fixed bandwidth must be positive");
    return spec.distance;
  }
  require(!index.empty(), ErrorCode::invalid_argument, "adaptive bandwidth on an empty index");
  if (spec.k > index.size()) {
    std::ostringstream msg;
    msg << "adaptive bandwidth k=" << spec.k << " exceeds the " << index.size() << " indexed points";
    fail(ErrorCode::invalid_bandwidth, msg.str());
  }
  const auto nn = index.knn(at, spec.k + 1);
  std::size_t skip = (!nn.empty() && nn.front().distance == 0.0) ? 1 : 0;
  const std::size_t available = nn.size() - skip;
  if (available == 0) {
    fail(ErrorCode::invalid_bandwidth, "adaptive bandwidth has no neighbours to measure against");
  }
  const std::size_t pos = skip + std::min(spec.k, available) - 1;
  const double d = nn[pos].distance;
  require(d > 0.0, ErrorCode::invalid_bandwidth,
          "adaptive bandwidth resolved to zero distance (coincident points)");
  return d;
}

double buffer_aggregate(const SpatialIndex& index, std::span<const double> values,
                        const Point& center, double radius, Aggregation agg) {
  require(values.size() == index.size(), ErrorCode::invalid_argument,
          "buffer_aggregate: one value per indexed point is required");
  require(radius >= 0.0, ErrorCode::invalid_argument, "buffer radius must be non-negative");
  const auto hits = index.within(center, radius);
  if (agg == Aggregation::count) return static_cast<double>(hits.size());
  double sum = 0.0;
  for (const auto& h : hits) sum += values[h.id];
  if (agg == Aggregation::sum) return sum;
  if (hits.empty()) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "empty buffer: no points within " << radius << " m of (" << center.x << ", "
        << center.y << ")";
    fail(ErrorCode::empty_buffer, msg.str());
  }
  return sum / static_cast<double>(hits.size());
}

std::vector<std::size_t> nearest_join(std::span<const Point> sources, const SpatialIndex& targets) {
  require(!targets.empty(), ErrorCode::invalid_argument, "nearest_join needs at least one target");
  std::vector<std::size_t> out;
  out.reserve(sources.size());
  for (const auto& s : sources) out.push_back(targets.nearest(s).id);
  return out;
}

}  // namespace sdm::spatial
