#include "sdm/dataset/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sdm/error.hpp"
#include "sdm/parallel.hpp"

namespace sdm::data {

using spatial::Point;
using spatial::SpatialIndex;

void FusionConfig::validate() const {
  require(buffer_radius_m > 0 && competitor_radius_m > 0 && census_radius_step_m > 0,
          ErrorCode::invalid_argument, "fusion radii must be positive");
  require(min_trip_distance_km >= 0, ErrorCode::invalid_argument,
          "trip distance lower bound must be non-negative");
  require(max_trip_distance_km > min_trip_distance_km, ErrorCode::invalid_argument,
          "trip distance range is empty");
  require(census_min_households >= 1, ErrorCode::invalid_argument,
          "census_min_households must be at least 1");
}

std::string FusionConfig::fingerprint() const {
  std::ostringstream out;
  out.precision(17);
  out << "buffer=" << buffer_radius_m << ";competitor=" << competitor_radius_m
      << ";min_households=" << census_min_households << ";step=" << census_radius_step_m
      << ";max_duration=" << max_trip_duration_h << ";distance=(" << min_trip_distance_km << ","
      << max_trip_distance_km << "];poi=";
  for (const auto& [group, raws] : poi_categories) {
    out << group << ":";
    for (const auto& r : raws) out << r << "|";
    out << ",";
  }
  out << ";census_mean=";
  for (const auto& a : census_mean_attributes) out << a << ",";
  out << ";boundary=";
  if (boundary) {
    for (const auto& v : *boundary) out << v.x << " " << v.y << ",";
  } else {
    out << "default";
  }
  return out.str();
}

void check_projected(std::span<const Point> points, const std::string& layer) {
  if (points.empty()) return;
  const bool lonlat = std::all_of(points.begin(), points.end(), [](const Point& p) {
    return std::abs(p.x) <= 180.0 && std::abs(p.y) <= 90.0;
  });
  if (lonlat) {
    fail(ErrorCode::invalid_argument,
         "layer '" + layer +
             "' looks like longitude/latitude; coordinates must be projected meters");
  }
}

double adaptive_radius(const SpatialIndex& index, const Point& center, double start, double step,
                       std::size_t min_count) {
  require(index.size() >= min_count, ErrorCode::invalid_argument,
          "not enough points to satisfy the minimum count");
  require(step > 0, ErrorCode::invalid_argument, "radius step must be positive");
  // The min_count-th nearest distance bounds the answer, so jump straight to it.
  const double needed = index.knn(center, min_count).back().distance;
  double radius = start;
  if (needed > radius) {
    const double m = std::ceil((needed - start) / step);
    radius = start + m * step;
    // Guard against rounding in the division.
    while (index.within(center, radius).size() < min_count) radius += step;
    while (radius - step >= start && index.within(center, radius - step).size() >= min_count) {
      radius -= step;
    }
  }
  return radius;
}

std::vector<std::string> poi_groups(const FusionConfig& cfg, const std::vector<PoiRecord>& pois) {
  std::vector<std::string> out;
  if (!cfg.poi_categories.empty()) {
    for (const auto& [group, raws] : cfg.poi_categories) out.push_back(group);
    return out;
  }
  std::set<std::string> distinct;
  for (const auto& p : pois) distinct.insert(p.category);
  return {distinct.begin(), distinct.end()};
}

std::vector<std::string> fused_column_names(const FusionConfig& cfg,
                                            const std::vector<std::string>& groups,
                                            const std::vector<std::string>& census_attributes,
                                            const std::vector<std::string>& household_attributes) {
  std::vector<std::string> out;
  for (const auto& g : groups) out.push_back("poi_density_" + g);
  for (const auto& a : household_attributes) out.push_back("hh_nearest_mean_" + a);
  for (const auto& a : census_attributes) {
    out.push_back(std::string(cfg.census_mean_attributes.count(a) ? "census_mean_" : "census_sum_") + a);
  }
  out.push_back("competing_stations");
  out.push_back("competing_cars");
  for (const auto& a : household_attributes) out.push_back("hh_radius_mean_" + a);
  out.push_back("supply_cars");
  return out;
}

FusionResult fuse_features(const std::vector<StationRecord>& stations,
                           const std::vector<PoiRecord>& pois, const AttributeLayer& census,
                           const AttributeLayer& households, const FusionConfig& cfg,
                           std::span<const double> demand) {
  cfg.validate();
  const std::size_t n = stations.size();
  require(n >= 3, ErrorCode::invalid_argument, "fusion needs at least 3 stations");
  require(demand.empty() || demand.size() == n, ErrorCode::schema_mismatch,
          "demand vector must have one entry per station");
  require(households.size() >= cfg.census_min_households, ErrorCode::invalid_argument,
          "fewer survey households than census_min_households in the whole dataset");

  std::vector<Point> station_pts;
  station_pts.reserve(n);
  for (const auto& s : stations) station_pts.push_back(s.location);
  std::vector<Point> poi_pts;
  poi_pts.reserve(pois.size());
  for (const auto& p : pois) poi_pts.push_back(p.location);

  check_projected(station_pts, "stations");
  check_projected(poi_pts, "pois");
  check_projected(census.points, "census");
  check_projected(households.points, "households");

  FusionResult result;
  result.voronoi = spatial::build_voronoi(station_pts, cfg.boundary);
  const SpatialIndex station_index(station_pts);
  const SpatialIndex census_index(census.points);
  const SpatialIndex household_index(households.points);

  // (a) POI densities per Voronoi cell.
  const auto groups = poi_groups(cfg, pois);
  std::map<std::string, std::size_t> group_of_raw;
  if (cfg.poi_categories.empty()) {
    for (std::size_t g = 0; g < groups.size(); ++g) group_of_raw[groups[g]] = g;
  } else {
    std::size_t g = 0;
    for (const auto& [group, raws] : cfg.poi_categories) {
      for (const auto& r : raws) group_of_raw[r] = g;
      ++g;
    }
  }
  std::vector<std::vector<double>> poi_counts(n, std::vector<double>(groups.size(), 0.0));
  for (std::size_t k = 0; k < pois.size(); ++k) {
    auto it = group_of_raw.find(pois[k].category);
    if (it == group_of_raw.end()) continue;
    if (!spatial::contains_convex(result.voronoi.boundary, pois[k].location, 0.0)) continue;
    const std::size_t s = station_index.nearest(pois[k].location).id;
    poi_counts[s][it->second] += 1.0;
  }

  // (b) survey households nearest-joined to stations.
  const std::size_t n_hh_attr = households.attributes.size();
  std::vector<std::vector<double>> hh_sum(n, std::vector<double>(n_hh_attr, 0.0));
  std::vector<std::size_t> hh_count(n, 0);
  if (!station_index.empty()) {
    const auto owner = spatial::nearest_join(households.points, station_index);
    for (std::size_t h = 0; h < owner.size(); ++h) {
      ++hh_count[owner[h]];
      for (std::size_t a = 0; a < n_hh_attr; ++a) hh_sum[owner[h]][a] += households.values[h][a];
    }
  }

  const auto names =
      fused_column_names(cfg, groups, census.attributes, households.attributes);
  const auto p = static_cast<Eigen::Index>(names.size());
  FeatureTable& table = result.table;
  table.X.setZero(static_cast<Eigen::Index>(n), p);
  table.y = demand.empty() ? Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))
                           : Eigen::Map<const Eigen::VectorXd>(demand.data(), static_cast<Eigen::Index>(n)).eval();
  result.household_radius_m.assign(n, 0.0);

  std::vector<std::vector<double>> census_cols(census.attributes.size());
  for (std::size_t a = 0; a < census.attributes.size(); ++a) {
    census_cols[a].reserve(census.size());
    for (const auto& row : census.values) census_cols[a].push_back(row[a]);
  }

  parallel_for(n, [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    Eigen::Index c = 0;
    const double cell_area = result.voronoi.areas_km2[i];
    for (std::size_t g = 0; g < groups.size(); ++g) {
      table.X(row, c++) = cell_area > 0 ? poi_counts[i][g] / cell_area : 0.0;
    }

    const Point& at = station_pts[i];
    const double radius = adaptive_radius(household_index, at, cfg.competitor_radius_m,
                                          cfg.census_radius_step_m, cfg.census_min_households);
    result.household_radius_m[i] = radius;
    const auto in_radius = household_index.within(at, radius);
    std::vector<double> radius_mean(n_hh_attr, 0.0);
    for (const auto& h : in_radius) {
      for (std::size_t a = 0; a < n_hh_attr; ++a) radius_mean[a] += households.values[h.id][a];
    }
    for (auto& v : radius_mean) v /= static_cast<double>(in_radius.size());

    for (std::size_t a = 0; a < n_hh_attr; ++a) {
      table.X(row, c++) = hh_count[i] > 0 ? hh_sum[i][a] / static_cast<double>(hh_count[i])
                                          : radius_mean[a];
    }

    for (std::size_t a = 0; a < census.attributes.size(); ++a) {
      const bool mean = cfg.census_mean_attributes.count(census.attributes[a]) > 0;
      if (census.size() == 0) {
        require(!mean, ErrorCode::empty_buffer, "census layer is empty");
        table.X(row, c++) = 0.0;
        continue;
      }
      table.X(row, c++) = spatial::buffer_aggregate(
          census_index, census_cols[a], at, cfg.buffer_radius_m,
          mean ? spatial::Aggregation::mean : spatial::Aggregation::sum);
    }

    double competing = 0.0;
    double competing_cars = 0.0;
    for (const auto& nb : station_index.within(at, cfg.competitor_radius_m)) {
      if (nb.id == i) continue;
      competing += 1.0;
      competing_cars += stations[nb.id].vehicles;
    }
    table.X(row, c++) = competing;
    table.X(row, c++) = competing_cars;

    for (std::size_t a = 0; a < n_hh_attr; ++a) table.X(row, c++) = radius_mean[a];
    table.X(row, c++) = stations[i].vehicles;
  });

  std::ostringstream buffer_tag;
  buffer_tag << "buffer<=" << cfg.buffer_radius_m << "m";
  std::ostringstream competitor_tag;
  competitor_tag << "within<=" << cfg.competitor_radius_m << "m excluding self";
  std::ostringstream radius_tag;
  radius_tag << "mean within " << cfg.competitor_radius_m << "m grown by "
             << cfg.census_radius_step_m << "m until >=" << cfg.census_min_households
             << " households";

  std::size_t k = 0;
  for (const auto& g : groups) {
    table.columns.push_back({names[k++], "1/km2", "voronoi cell count / cell area (" + g + ")"});
  }
  for (std::size_t a = 0; a < n_hh_attr; ++a) {
    table.columns.push_back({names[k++], "", "mean over nearest-joined households (fallback: adaptive radius)"});
  }
  for (const auto& attr : census.attributes) {
    const bool mean = cfg.census_mean_attributes.count(attr) > 0;
    table.columns.push_back({names[k++], "", std::string(mean ? "mean " : "sum ") + buffer_tag.str()});
  }
  table.columns.push_back({names[k++], "stations", "count " + competitor_tag.str()});
  table.columns.push_back({names[k++], "cars", "vehicle sum " + competitor_tag.str()});
  for (std::size_t a = 0; a < n_hh_attr; ++a) {
    table.columns.push_back({names[k++], "", radius_tag.str()});
  }
  table.columns.push_back({names[k++], "cars", "station vehicle count"});

  for (const auto& s : stations) table.station_ids.push_back(s.station_id);
  table.locations = station_pts;
  table.validate();
  return result;
}

}  // namespace sdm::data
