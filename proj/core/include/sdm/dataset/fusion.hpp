#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sdm/dataset/feature_table.hpp"
#include "sdm/dataset/records.hpp"
#include "sdm/spatial/spatial_index.hpp"
#include "sdm/spatial/voronoi.hpp"

namespace sdm::data {

struct FusionConfig {
  double buffer_radius_m = 750.0;
  double competitor_radius_m = 1000.0;
  std::size_t census_min_households = 10;
  double census_radius_step_m = 250.0;
  double max_trip_duration_h = 500.0;
  double min_trip_distance_km = 0.0;   // exclusive
  double max_trip_distance_km = 500.0; // inclusive
  /// Output group -> raw POI categories counted into it. Empty: one group per raw category.
  std::map<std::string, std::vector<std::string>> poi_categories;
  /// Census attributes averaged instead of summed inside the buffer.
  std::set<std::string> census_mean_attributes;
  std::optional<spatial::Polygon> boundary;

  void validate() const;
  /// Stable textual digest of every field; used to detect train/serve skew.
  std::string fingerprint() const;
};

struct FusionResult {
  FeatureTable table;
  spatial::VoronoiPartition voronoi;
  std::vector<double> household_radius_m;  // resolved adaptive radius per station
};

/// Smallest radius start + m*step (m >= 0) capturing at least min_count points.
double adaptive_radius(const spatial::SpatialIndex& index, const spatial::Point& center,
                       double start, double step, std::size_t min_count);

/// Column names fuse_features will produce for the given config and layer schemas.
std::vector<std::string> fused_column_names(const FusionConfig& cfg,
                                            const std::vector<std::string>& poi_groups,
                                            const std::vector<std::string>& census_attributes,
                                            const std::vector<std::string>& household_attributes);

/// POI group names in output order for a config and a POI set.
std::vector<std::string> poi_groups(const FusionConfig& cfg, const std::vector<PoiRecord>& pois);

/// Station-level features from raw layers. `demand` (trips/month, optional)
/// becomes the target; empty leaves y at zero.
FusionResult fuse_features(const std::vector<StationRecord>& stations,
                           const std::vector<PoiRecord>& pois, const AttributeLayer& census,
                           const AttributeLayer& households, const FusionConfig& cfg,
                           std::span<const double> demand = {});

/// Throws when every point of the layer fits in |x| <= 180, |y| <= 90.
void check_projected(std::span<const spatial::Point> points, const std::string& layer);

}  // namespace sdm::data
