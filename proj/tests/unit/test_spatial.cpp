#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdm/error.hpp"
#include "sdm/spatial/geometry.hpp"
#include "sdm/spatial/kernel.hpp"
#include "sdm/spatial/spatial_index.hpp"
#include "sdm/spatial/voronoi.hpp"
#include "sdm/spatial/weights.hpp"
#include "test_support.hpp"

using namespace sdm;
using namespace sdm::spatial;
using sdm::testing::random_points;

namespace {

const Kernel kAllKernels[] = {Kernel::gaussian, Kernel::exponential, Kernel::bisquare, Kernel::boxcar};

// Indices sorted by (distance, id); the reference every index query is held to.
std::vector<std::size_t> sorted_by_distance(const std::vector<Point>& pts, const Point& q) {
  std::vector<std::size_t> ids(pts.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    return distance(pts[a], q) < distance(pts[b], q);
  });
  return ids;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

}  // namespace

TEST(Kernel, ZeroDistanceIsOneForEveryFamily) {
  for (Kernel k : kAllKernels) EXPECT_EQ(kernel_weight(k, 0.0, 1000.0), 1.0) << to_string(k);
}

TEST(Kernel, ClosedForms) {
  const double b = 1234.5;
  EXPECT_NEAR(kernel_weight(Kernel::gaussian, b, b), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(kernel_weight(Kernel::gaussian, b, b), 0.60653, 1e-5);
  EXPECT_NEAR(kernel_weight(Kernel::exponential, 2 * b, b), std::exp(-2.0), 1e-15);
  EXPECT_NEAR(kernel_weight(Kernel::bisquare, 0.5 * b, b), 0.5625, 1e-15);
  EXPECT_EQ(kernel_weight(Kernel::bisquare, b, b), 0.0);
  EXPECT_EQ(kernel_weight(Kernel::boxcar, 0.999 * b, b), 1.0);
  EXPECT_EQ(kernel_weight(Kernel::boxcar, b, b), 0.0);
}

TEST(Kernel, MonotoneAndSupport) {
  for (Kernel k : kAllKernels) {
    double prev = 1.0;
    for (int i = 0; i <= 400; ++i) {
      const double d = 10.0 * i;
      const double w = kernel_weight(k, d, 1000.0);
      EXPECT_LE(w, prev) << to_string(k) << " d=" << d;
      EXPECT_GE(w, 0.0);
      if (has_compact_support(k) && d >= 1000.0) {
        EXPECT_EQ(w, 0.0);
      }
      if (!has_compact_support(k)) {
        EXPECT_GT(w, 0.0);
      }
      prev = w;
    }
  }
}

TEST(Kernel, NonPositiveBandwidthRejected) {
  EXPECT_EQ(code_of([] { kernel_weight(Kernel::gaussian, 1.0, 0.0); }), ErrorCode::invalid_bandwidth);
  EXPECT_EQ(code_of([] { kernel_weight(Kernel::bisquare, 1.0, -5.0); }), ErrorCode::invalid_bandwidth);
}

TEST(Kernel, BandwidthTextRoundTrip) {
  EXPECT_EQ(parse_bandwidth("adaptive:232"), Bandwidth::adaptive(232));
  EXPECT_EQ(parse_bandwidth("fixed:40800"), Bandwidth::fixed(40800));
  EXPECT_EQ(parse_bandwidth(to_string(Bandwidth::fixed(39600.25))), Bandwidth::fixed(39600.25));
  EXPECT_THROW(parse_bandwidth("fixed:-1"), Error);
  EXPECT_THROW(parse_bandwidth("elastic:3"), Error);
  for (Kernel k : kAllKernels) EXPECT_EQ(parse_kernel(to_string(k)), k);
}

TEST(SpatialIndex, KnnMatchesSortOracle) {
  const auto pts = random_points(1439, 50'000.0, 11);
  const SpatialIndex index(pts);
  const auto queries = random_points(60, 50'000.0, 12);
  for (const auto& q : queries) {
    const auto got = index.knn(q, 25);
    const auto want = sorted_by_distance(pts, q);
    ASSERT_EQ(got.size(), 25u);
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].id, want[i]);
      EXPECT_EQ(got[i].distance, distance(pts[want[i]], q));
    }
  }
  EXPECT_EQ(index.knn(queries[0], 5000).size(), pts.size());
}

TEST(SpatialIndex, ResolveBandwidth) {
  const std::vector<Point> pts = {{10, 0}, {0, 20}, {-30, 0}};
  const SpatialIndex index(pts);
  EXPECT_EQ(resolve_bandwidth(index, {0, 0}, Bandwidth::fixed(40'800)), 40'800);
  EXPECT_EQ(resolve_bandwidth(index, {0, 0}, Bandwidth::adaptive(2)), 20.0);
  EXPECT_THROW(resolve_bandwidth(index, {0, 0}, Bandwidth::adaptive(4)), Error);
  // An indexed query skips itself.
  EXPECT_EQ(resolve_bandwidth(index, {10, 0}, Bandwidth::adaptive(1)), distance({10, 0}, {0, 20}));
}

TEST(SpatialIndex, ResolveAdaptiveOnLargeCloud) {
  const auto pts = random_points(1439, 80'000.0, 5);
  const SpatialIndex index(pts);
  for (std::size_t q = 0; q < 40; ++q) {
    const Point at = pts[q * 31];
    std::vector<double> d;
    for (const auto& p : pts) {
      if (!(p == at)) d.push_back(distance(p, at));
    }
    std::sort(d.begin(), d.end());
    EXPECT_EQ(resolve_bandwidth(index, at, Bandwidth::adaptive(232)), d[231]);
  }
}

TEST(SpatialIndex, WithinIsClosedAndMatchesScan) {
  const auto pts = random_points(3000, 10'000.0, 21);
  const SpatialIndex index(pts);
  for (const auto& c : random_points(50, 10'000.0, 22)) {
    auto got = index.within(c, 750.0);
    std::size_t count = 0;
    for (const auto& p : pts) count += distance(p, c) <= 750.0;
    EXPECT_EQ(got.size(), count);
  }
  const SpatialIndex two({{0, 0}, {1000, 0}});
  EXPECT_EQ(two.within({0, 0}, 1000.0).size(), 2u);
}

TEST(BufferAggregate, Examples) {
  const std::vector<Point> pts = {{100, 0}, {0, 700}, {-800, 0}};
  const SpatialIndex index(pts);
  const std::vector<double> v = {1, 2, 3};
  EXPECT_EQ(buffer_aggregate(index, v, {0, 0}, 750, Aggregation::sum), 3.0);
  EXPECT_EQ(buffer_aggregate(index, v, {0, 0}, 750, Aggregation::mean), 1.5);
  EXPECT_EQ(buffer_aggregate(index, v, {0, 0}, 50, Aggregation::count), 0.0);
  EXPECT_EQ(buffer_aggregate(index, v, {0, 0}, 50, Aggregation::sum), 0.0);
  try {
    buffer_aggregate(index, v, {0, 0}, 50, Aggregation::mean);
    FAIL() << "empty mean accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_buffer);
    EXPECT_NE(std::string(e.what()).find("50"), std::string::npos);
  }
}

TEST(BufferAggregate, MatchesScanOracle) {
  const auto pts = random_points(10'000, 20'000.0, 31);
  std::vector<double> v(pts.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.37 * static_cast<double>(i)) * 10.0;
  const SpatialIndex index(pts);
  for (const auto& c : random_points(100, 20'000.0, 32)) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (distance(pts[i], c) <= 750.0) sum += v[i], ++count;
    }
    EXPECT_EQ(buffer_aggregate(index, v, c, 750.0, Aggregation::count), static_cast<double>(count));
    EXPECT_NEAR(buffer_aggregate(index, v, c, 750.0, Aggregation::sum), sum, 1e-9);
  }
}

TEST(NearestJoin, TieGoesToLowestId) {
  std::vector<Point> targets(8, Point{1e6, 1e6});
  targets[3] = {-5, 0};
  targets[7] = {5, 0};
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (i != 3 && i != 7) targets[i] = {1e6 + static_cast<double>(i), 1e6};
  }
  const SpatialIndex index(targets);
  const std::vector<Point> src = {{0, 0}, {0, 3}};
  EXPECT_EQ(nearest_join(src, index), (std::vector<std::size_t>{3, 3}));
  const SpatialIndex single({{4, 4}});
  EXPECT_EQ(nearest_join(src, single), (std::vector<std::size_t>{0, 0}));
}

TEST(NearestJoin, MatchesArgminOracle) {
  const auto targets = random_points(100, 5000.0, 41);
  const auto sources = random_points(1000, 5000.0, 42);
  const auto got = nearest_join(sources, SpatialIndex(targets));
  for (std::size_t s = 0; s < sources.size(); ++s) {
    EXPECT_EQ(got[s], sorted_by_distance(targets, sources[s]).front());
  }
}

TEST(Weights, CollinearMiddlePoint) {
  const SpatialIndex index({{0, 0}, {1, 0}, {3, 0}});
  const auto w = knn_weights(index, 1, false);
  ASSERT_EQ(w.rows[1].size(), 1u);
  EXPECT_EQ(w.rows[1][0].j, 0u);
  EXPECT_THROW(knn_weights(index, 3, false), Error);
}

TEST(Weights, KnnRowStandardizedMatchesOracle) {
  const auto pts = random_points(400, 1000.0, 51);
  const auto w = knn_weights(SpatialIndex(pts), 8, true);
  EXPECT_TRUE(w.row_standardized);
  EXPECT_NEAR(w.total, 400.0, 1e-9);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double sum = 0.0;
    std::vector<std::size_t> got;
    for (const auto& e : w.rows[i]) {
      EXPECT_NE(e.j, i);
      sum += e.w;
      got.push_back(e.j);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    auto want = sorted_by_distance(pts, pts[i]);
    want.erase(std::find(want.begin(), want.end(), i));
    want.resize(8);
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, want);
  }
}

TEST(Weights, Deterministic) {
  const auto pts = random_points(300, 1000.0, 52);
  const auto a = knn_weights(SpatialIndex(pts), 8, false);
  const auto b = knn_weights(SpatialIndex(pts), 8, false);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ASSERT_EQ(a.rows[i].size(), b.rows[i].size());
    for (std::size_t k = 0; k < a.rows[i].size(); ++k) EXPECT_EQ(a.rows[i][k].j, b.rows[i][k].j);
  }
}

TEST(Geometry, HullAndClip) {
  const Polygon hull = convex_hull({{0, 0}, {2, 0}, {1, 1}, {2, 2}, {0, 2}, {1, 0}});
  EXPECT_EQ(hull.size(), 4u);
  EXPECT_NEAR(signed_area(hull), 4.0, 1e-12);
  EXPECT_TRUE(contains_convex(hull, {2, 1}));
  EXPECT_FALSE(contains_convex(hull, {2.01, 1}));
  const Polygon half = clip_halfplane(hull, 1, 0, 1);  // x <= 1
  EXPECT_NEAR(area(half), 2.0, 1e-12);
  const Polygon grown = buffer_convex(hull, 1.0, 16);
  EXPECT_TRUE(is_convex(grown));
  EXPECT_GT(area(grown), 4.0 + 8.0);
  EXPECT_LT(area(grown), 4.0 + 8.0 + M_PI);
}

TEST(Voronoi, SymmetricGrid) {
  const std::vector<Point> st = {{500, 500}, {1500, 500}, {500, 1500}, {1500, 1500}};
  const Polygon box = {{0, 0}, {2000, 0}, {2000, 2000}, {0, 2000}};
  const auto v = build_voronoi(st, box);
  for (double a : v.areas_km2) EXPECT_NEAR(a, 1.0, 1e-12);
  EXPECT_FALSE(v.default_boundary);
}

TEST(Voronoi, RasterNearestOracleAndClosure) {
  const auto st = random_points(50, 10'000.0, 61);
  const Polygon box = {{-100, -100}, {10'100, -100}, {10'100, 10'100}, {-100, 10'100}};
  const auto v = build_voronoi(st, box);
  double total = 0.0;
  for (std::size_t i = 0; i < st.size(); ++i) {
    total += v.areas_km2[i];
    EXPECT_TRUE(contains_convex(v.cells[i], st[i]));
  }
  EXPECT_NEAR(total * 1e6, area(box), 1e-3 * area(box));
  const SpatialIndex index(st);
  std::size_t mismatches = 0;
  for (int gx = 0; gx < 200; ++gx) {
    for (int gy = 0; gy < 200; ++gy) {
      const Point p{-100 + (gx + 0.5) * 51.0, -100 + (gy + 0.5) * 51.0};
      const auto near = sorted_by_distance(st, p);
      // Skip raster points that sit on a cell border.
      if (std::abs(distance(st[near[0]], p) - distance(st[near[1]], p)) < 1e-6) continue;
      mismatches += !contains_convex(v.cells[near[0]], p, 1e-6);
    }
  }
  EXPECT_EQ(mismatches, 0u);
}

TEST(Voronoi, DuplicatesAndDegenerateInputRejected) {
  EXPECT_EQ(code_of([] { build_voronoi({{0, 0}, {5, 5}, {0, 0}, {9, 1}}); }), ErrorCode::duplicate_points);
  EXPECT_THROW(build_voronoi({{0, 0}, {1, 1}, {2, 2}}), Error);
  EXPECT_THROW(build_voronoi({{0, 0}, {1, 0}}), Error);
}

TEST(Voronoi, DefaultBoundaryFlaggedAndCoversStations) {
  const auto st = random_points(40, 5000.0, 62);
  const auto v = build_voronoi(st);
  EXPECT_TRUE(v.default_boundary);
  EXPECT_GT(v.boundary_buffer_m, 0.0);
  for (const auto& p : st) EXPECT_TRUE(contains_convex(v.boundary, p));
  double total = 0.0;
  for (double a : v.areas_km2) total += a;
  EXPECT_NEAR(total * 1e6, area(v.boundary), 1e-3 * area(v.boundary));
}
