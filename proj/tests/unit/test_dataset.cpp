#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "fusion_oracle.hpp"
#include "sdm/dataset/csv_io.hpp"
#include "sdm/dataset/feature_table.hpp"
#include "sdm/dataset/folds.hpp"
#include "sdm/dataset/fusion.hpp"
#include "sdm/dataset/synth.hpp"
#include "sdm/dataset/trips.hpp"
#include "sdm/error.hpp"
#include "sdm/linear/ols.hpp"
#include "test_support.hpp"

using namespace sdm;
using namespace sdm::data;

namespace {

TripRecord trip(double duration, double distance, TripKind kind = TripKind::return_trip,
                const std::string& station = "A") {
  return {station, 1546300800, duration, distance, kind};
}

FusionConfig small_config() {
  FusionConfig cfg;
  cfg.census_min_households = 5;
  return cfg;
}

}  // namespace

TEST(CleanTrips, DefaultThresholds) {
  const FusionConfig cfg;
  const std::vector<TripRecord> in = {trip(501, 10),  trip(500, 10), trip(2, 0.0), trip(2, 500.0),
                                      trip(2, 500.01), trip(2, 3, TripKind::one_way),
                                      trip(2, 3, TripKind::other)};
  const auto out = clean_trips(in, cfg);
  ASSERT_EQ(out.trips.size(), 2u);
  EXPECT_EQ(out.trips[0].duration_h, 500);
  EXPECT_EQ(out.trips[1].distance_km, 500.0);
  EXPECT_EQ(out.removed_duration, 1u);
  EXPECT_EQ(out.removed_distance, 2u);
  EXPECT_EQ(out.removed_kind, 2u);
}

TEST(CleanTrips, NoOpAndIdempotent) {
  const FusionConfig cfg;
  std::vector<TripRecord> in;
  for (int i = 1; i <= 20; ++i) in.push_back(trip(0.5 * i, 2.0 * i));
  const auto once = clean_trips(in, cfg);
  EXPECT_EQ(once.trips.size(), in.size());
  const auto raw = synth_raw({}, 9).trips;
  const auto a = clean_trips(raw, cfg);
  const auto b = clean_trips(a.trips, cfg);
  ASSERT_EQ(a.trips.size(), b.trips.size());
  EXPECT_EQ(b.removed_duration + b.removed_distance + b.removed_kind, 0u);
}

TEST(ComputeDemand, ExactArithmetic) {
  const std::vector<StationRecord> st = {{"A", {0, 0}, 2}, {"B", {10, 0}, 1}};
  std::vector<TripRecord> trips(24, trip(1, 1, TripKind::return_trip, "A"));
  const std::int64_t start = 0;
  const std::int64_t end = static_cast<std::int64_t>(365.25 * 86400);
  const auto d = compute_demand(trips, st, start, end);
  EXPECT_NEAR(d[0], 2.0, 1e-12);
  EXPECT_EQ(d[1], 0.0);

  std::vector<TripRecord> busy(870, trip(1, 1, TripKind::return_trip, "B"));
  const auto w0 = parse_timestamp("2019-01-01");
  const auto w1 = parse_timestamp("2020-02-28");
  EXPECT_EQ((w1 - w0) / 86400, 423);
  EXPECT_NEAR(compute_demand(busy, st, w0, w1)[1], 870.0 / (423.0 / 30.4375), 1e-9);
  EXPECT_NEAR(compute_demand(busy, st, w0, w1)[1], 62.6, 0.05);
}

TEST(ComputeDemand, UnknownStationListed) {
  const std::vector<StationRecord> st = {{"A", {0, 0}, 2}};
  try {
    compute_demand({trip(1, 1, TripKind::return_trip, "ghost")}, st, 0, 86400);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::schema_mismatch);
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST(ComputeDemand, TotalConservation) {
  const auto raw = synth_raw({}, 4);
  const auto cleaned = clean_trips(raw.trips, {}).trips;
  const auto d = compute_demand(cleaned, raw.stations, raw.window_start, raw.window_end);
  const double months = static_cast<double>(raw.window_end - raw.window_start) / 86400.0 / kDaysPerMonth;
  const double total = std::accumulate(d.begin(), d.end(), 0.0) * months;
  EXPECT_NEAR(total, static_cast<double>(cleaned.size()), 1e-9 * static_cast<double>(cleaned.size()));
}

TEST(Fusion, DensityExample) {
  // 2x2 grid in a 4 km x 2 km box: every cell is 2 km x 1 km.
  const double ox = 2'600'000, oy = 1'200'000;
  const std::vector<StationRecord> st = {{"A", {ox + 1000, oy + 500}, 3},
                                         {"B", {ox + 3000, oy + 500}, 1},
                                         {"C", {ox + 1000, oy + 1500}, 2},
                                         {"D", {ox + 3000, oy + 1500}, 2}};
  FusionConfig cfg = small_config();
  cfg.census_min_households = 1;
  cfg.boundary = spatial::Polygon{{ox, oy}, {ox + 4000, oy}, {ox + 4000, oy + 2000}, {ox, oy + 2000}};
  std::vector<PoiRecord> pois;
  for (int k = 0; k < 6; ++k) pois.push_back({{ox + 100.0 + 100 * k, oy + 400}, "public"});
  pois.push_back({{ox + 3500, oy + 1500}, "other"});
  AttributeLayer census{{"population"}, {{ox + 1000, oy + 500}}, {{7}}};
  AttributeLayer hh{{"income"}, {{ox + 1010, oy + 500}}, {{100}}};
  const auto r = fuse_features(st, pois, census, hh, cfg);
  for (double a : r.voronoi.areas_km2) EXPECT_NEAR(a, 2.0, 1e-12);
  const auto j = static_cast<Eigen::Index>(r.table.column_index("poi_density_public"));
  EXPECT_NEAR(r.table.X(0, j), 3.0, 1e-12);
  EXPECT_EQ(r.table.X(1, j), 0.0);
  EXPECT_NEAR(r.table.X(3, static_cast<Eigen::Index>(r.table.column_index("poi_density_other"))), 0.5, 1e-12);
}

TEST(Fusion, AdaptiveRadiusExample) {
  // 4 households within 1 km and 11 within 1.5 km of the centre.
  std::vector<spatial::Point> pts;
  for (int k = 0; k < 4; ++k) pts.push_back({900.0 * std::cos(k), 900.0 * std::sin(k)});
  for (int k = 0; k < 7; ++k) pts.push_back({1400.0 * std::cos(k + 0.3), 1400.0 * std::sin(k + 0.3)});
  for (int k = 0; k < 5; ++k) pts.push_back({5000.0 + k, 0});
  const spatial::SpatialIndex index(pts);
  EXPECT_EQ(adaptive_radius(index, {0, 0}, 1000, 250, 10), 1500.0);
  EXPECT_EQ(adaptive_radius(index, {0, 0}, 1000, 250, 4), 1000.0);
  EXPECT_EQ(adaptive_radius(index, {0, 0}, 1000, 250, 11), 1500.0);
}

TEST(Fusion, CompetitorsClosedAndExcludeSelf) {
  const double o = 1e6;
  const std::vector<StationRecord> st = {{"A", {o, o}, 2}, {"B", {o + 1000, o}, 5}, {"C", {o, o + 3000}, 1}};
  FusionConfig cfg = small_config();
  cfg.census_min_households = 1;
  AttributeLayer census{{"population"}, {{o, o}}, {{1}}};
  AttributeLayer hh{{"income"}, {{o, o}}, {{1}}};
  const auto r = fuse_features(st, {}, census, hh, cfg);
  const auto cs = static_cast<Eigen::Index>(r.table.column_index("competing_stations"));
  const auto cc = static_cast<Eigen::Index>(r.table.column_index("competing_cars"));
  EXPECT_EQ(r.table.X(0, cs), 1.0);
  EXPECT_EQ(r.table.X(0, cc), 5.0);
  EXPECT_EQ(r.table.X(1, cc), 2.0);
  EXPECT_EQ(r.table.X(2, cs), 0.0);
}

TEST(Fusion, MatchesBruteForceOracle) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    RawSynthConfig rc;
    rc.stations = 60;
    rc.pois = 800;
    rc.census_cells = 4000;
    rc.households = 150;
    const auto raw = synth_raw(rc, seed);
    FusionConfig cfg;
    cfg.census_mean_attributes = {"workplaces"};
    cfg.poi_categories = {{"daily", {"shop", "restaurant"}}, {"education", {"school"}}};
    const spatial::Polygon box = {{rc.origin_x - 500, rc.origin_y - 500},
                                  {rc.origin_x + rc.extent_m + 500, rc.origin_y - 500},
                                  {rc.origin_x + rc.extent_m + 500, rc.origin_y + rc.extent_m + 500},
                                  {rc.origin_x - 500, rc.origin_y + rc.extent_m + 500}};
    cfg.boundary = box;
    const auto r = fuse_features(raw.stations, raw.pois, raw.census, raw.households, cfg);
    const auto want = sdm::testing::fusion_oracle(raw.stations, raw.pois, raw.census, raw.households, cfg, box);
    ASSERT_EQ(want.size(), r.table.features());
    for (const auto& [name, col] : want) {
      const auto j = static_cast<Eigen::Index>(r.table.column_index(name));
      for (std::size_t i = 0; i < col.size(); ++i) {
        const double got = r.table.X(static_cast<Eigen::Index>(i), j);
        EXPECT_NEAR(got, col[i], 1e-9 * std::max(1.0, std::abs(col[i]))) << name << " row " << i;
      }
    }
  }
}

TEST(Fusion, ColumnNamesArePureFunctionOfSchema) {
  const auto a = synth_raw({}, 1);
  const auto b = synth_raw({}, 2);
  FusionConfig cfg;
  const auto ra = fuse_features(a.stations, a.pois, a.census, a.households, cfg);
  const auto rb = fuse_features(b.stations, b.pois, b.census, b.households, cfg);
  EXPECT_EQ(ra.table.column_names(), rb.table.column_names());
  EXPECT_EQ(ra.table.column_names(),
            fused_column_names(cfg, poi_groups(cfg, a.pois), a.census.attributes, a.households.attributes));
  for (const auto& c : ra.table.columns) EXPECT_FALSE(c.provenance.empty()) << c.name;
  EXPECT_TRUE(ra.voronoi.default_boundary);
}

TEST(Fusion, Errors) {
  auto raw = synth_raw({}, 3);
  FusionConfig cfg;
  cfg.census_min_households = raw.households.size() + 1;
  EXPECT_THROW(fuse_features(raw.stations, raw.pois, raw.census, raw.households, cfg), Error);
  cfg = {};
  auto lonlat = raw.stations;
  for (std::size_t i = 0; i < lonlat.size(); ++i) lonlat[i].location = {8.5 + 0.001 * i, 47.3 + 0.0007 * (i % 13)};
  try {
    fuse_features(lonlat, raw.pois, raw.census, raw.households, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("longitude"), std::string::npos);
  }
}

TEST(Standardize, TwoPointAndRoundTrip) {
  const auto base = synth_generate(synth_preset("uniform"), 5).table;
  FeatureTable t = sdm::testing::make_table({{0, 0}, {1, 0}, {0, 1}}, (Eigen::MatrixXd(3, 1) << 0, 2, 1).finished(),
                                            Eigen::Vector3d(1, 2, 3));
  const auto s = standardize(t);
  EXPECT_NEAR(s.X(0, 0), -std::sqrt(1.5), 1e-12);
  FeatureTable two = sdm::testing::make_table({{0, 0}, {1, 0}}, (Eigen::MatrixXd(2, 1) << 0, 2).finished(),
                                              Eigen::Vector2d(5, 7));
  const auto s2 = standardize(two);
  EXPECT_DOUBLE_EQ(s2.X(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(s2.X(1, 0), 1.0);

  const auto z = standardize(base);
  for (Eigen::Index j = 0; j < z.X.cols(); ++j) {
    EXPECT_LT(std::abs(z.X.col(j).mean()), 1e-9);
    EXPECT_NEAR(std::sqrt((z.X.col(j).array() - z.X.col(j).mean()).square().mean()), 1.0, 1e-9);
  }
  const auto back = destandardize(z);
  EXPECT_LT((back.X - base.X).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((back.y - base.y).cwiseAbs().maxCoeff(), 1e-10);
  FeatureTable plain = z;
  plain.standardization.reset();
  const auto again = standardize(plain);
  EXPECT_LT((again.X - z.X).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Standardize, ZeroVarianceNamed) {
  Eigen::MatrixXd X(4, 2);
  X << 1, 3, 2, 3, 3, 3, 4, 3;
  auto t = sdm::testing::make_table({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, X, Eigen::Vector4d(1, 2, 3, 5));
  t.columns[1].name = "flat_column";
  try {
    standardize(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("flat_column"), std::string::npos);
  }
}

TEST(Synth, NoiselessOlsRecovery) {
  SynthConfig cfg;
  cfg.n = 200;
  cfg.intercept = Surface::constant(0.25);
  cfg.surfaces = {Surface::constant(3.0), Surface::constant(-2.0)};
  const auto r = synth_generate(cfg, 8);
  const auto fit = linear::ols_fit(r.table);
  EXPECT_NEAR(fit.beta(0), 0.25, 1e-10);
  EXPECT_NEAR(fit.beta(1), 3.0, 1e-10);
  EXPECT_NEAR(fit.beta(2), -2.0, 1e-10);
}

TEST(Synth, StepSurfaceRecoveredPerHalf) {
  SynthConfig cfg;
  cfg.n = 600;
  cfg.surfaces = {Surface::step(2.0, -1.0, 50'000.0)};
  cfg.sigma = 0.2;
  const auto r = synth_generate(cfg, 17);
  std::vector<std::size_t> west, east;
  for (std::size_t i = 0; i < r.table.rows(); ++i) (r.table.locations[i].x < 50'000.0 ? west : east).push_back(i);
  const auto fw = linear::ols_fit(r.table.select_rows(west));
  const auto fe = linear::ols_fit(r.table.select_rows(east));
  EXPECT_LT(std::abs(fw.beta(1) - 2.0), 3 * fw.se(1));
  EXPECT_LT(std::abs(fe.beta(1) + 1.0), 3 * fe.se(1));
}

TEST(Synth, DeterministicAndValidated) {
  const auto a = synth_generate(synth_preset("multiscale"), 3).table;
  const auto b = synth_generate(synth_preset("multiscale"), 3).table;
  EXPECT_TRUE(a.X == b.X);
  EXPECT_TRUE(a.y == b.y);
  SynthConfig bad;
  bad.n = 3;
  bad.surfaces = {Surface::constant(1), Surface::constant(1)};
  EXPECT_THROW(synth_generate(bad, 1), Error);
  EXPECT_THROW(synth_preset("nope"), Error);
}

TEST(Folds, PartitionAndDeterminism) {
  const auto f = make_folds(103, 10, 42);
  std::set<std::size_t> seen;
  std::size_t lo = 1000, hi = 0;
  for (const auto& fold : f) {
    lo = std::min(lo, fold.size());
    hi = std::max(hi, fold.size());
    for (auto i : fold) EXPECT_TRUE(seen.insert(i).second);
  }
  EXPECT_EQ(seen.size(), 103u);
  EXPECT_LE(hi - lo, 1u);
  EXPECT_EQ(f, make_folds(103, 10, 42));
  EXPECT_NE(f, make_folds(103, 10, 43));
  EXPECT_EQ(training_rows(f, 0).size() + f[0].size(), 103u);
  EXPECT_THROW(make_folds(5, 6, 1), Error);
}

TEST(CsvIo, FeatureTableRoundTrip) {
  sdm::testing::TempDir dir("csv");
  const auto t = standardize(synth_generate(synth_preset("uniform"), 2).table);
  TableMetadata meta{"fp-123", true};
  write_feature_table(dir / "t.csv", t, meta);
  TableMetadata back_meta;
  const auto back = read_feature_table(dir / "t.csv", &back_meta);
  EXPECT_EQ(back.column_names(), t.column_names());
  EXPECT_EQ(back.station_ids, t.station_ids);
  EXPECT_TRUE(back.X == t.X);
  EXPECT_TRUE(back.y == t.y);
  ASSERT_TRUE(back.standardization.has_value());
  EXPECT_TRUE(back.standardization->x_std == t.standardization->x_std);
  EXPECT_EQ(back_meta.fusion_fingerprint, "fp-123");
  EXPECT_TRUE(back_meta.default_voronoi_boundary);
  EXPECT_THROW(read_feature_table(dir / "missing.csv"), Error);
}

TEST(CsvIo, ManifestAndColumnRoles) {
  sdm::testing::TempDir dir("manifest");
  {
    std::ofstream(dir / "st.csv") << "id,easting,northing,cars\nA,2600000,1200000,3\nB,2601000,1200000,1\n";
  }
  const auto m = Manifest::parse(
      "# roles\nstations=st.csv\ncolumn.station_id=id\ncolumn.x=easting\ncolumn.y=northing\n"
      "column.vehicles=cars\nbuffer_radius_m=500\npoi_category.daily=shop,restaurant\n",
      dir.path());
  const auto st = read_stations(m.path("stations"), m);
  ASSERT_EQ(st.size(), 2u);
  EXPECT_EQ(st[1].station_id, "B");
  EXPECT_EQ(st[0].vehicles, 3.0);
  const auto cfg = fusion_config_from(m);
  EXPECT_EQ(cfg.buffer_radius_m, 500.0);
  EXPECT_EQ(cfg.poi_categories.at("daily"), (std::vector<std::string>{"shop", "restaurant"}));
  EXPECT_EQ(parse_timestamp("1970-01-02"), 86400);
  EXPECT_EQ(parse_timestamp("1970-01-01T01:00:00"), 3600);
}
