#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sdm/dataset/feature_table.hpp"
#include "sdm/dataset/fusion.hpp"
#include "sdm/dataset/records.hpp"
#include "sdm/service/bundle.hpp"

namespace sdm::service {

inline constexpr const char* kSupplyFeature = "supply_cars";
inline constexpr double kNeighbourhoodRadiusM = 3000.0;

/// Raw layers used to fuse features for a hypothetical station.
struct FusionSource {
  std::vector<data::StationRecord> stations;
  std::vector<data::PoiRecord> pois;
  data::AttributeLayer census;
  data::AttributeLayer households;
  data::FusionConfig config;
};

enum class FeatureMode { auto_fuse, fixed_features };

std::string_view to_string(FeatureMode m);
FeatureMode parse_feature_mode(std::string_view text);

struct WhatIfRequest {
  spatial::Point location;
  FeatureMode mode = FeatureMode::auto_fuse;
  std::map<std::string, double> features;  // fixed-features base values, raw units
  std::size_t supply_min = 1;
  std::size_t supply_max = 10;
  std::vector<std::string> models;  // empty = every loaded model that can predict
};

struct NeighbourhoodStats {
  double radius_m = kNeighbourhoodRadiusM;
  std::size_t station_count = 0;
  std::optional<double> mean_supply_cars;
  std::optional<double> mean_demand_trips_per_month;
  std::optional<std::string> largest_station_id;
  std::optional<double> largest_supply_cars;
  std::optional<double> largest_demand_trips_per_month;
};

struct ModelCurve {
  std::string model;
  std::string kind;
  std::vector<double> demand_trips_per_month;
};

struct WhatIfResponse {
  spatial::Point location;
  FeatureMode mode = FeatureMode::auto_fuse;
  std::vector<double> supply_cars;
  std::vector<ModelCurve> curves;
  NeighbourhoodStats neighbourhood;
  std::map<std::string, double> base_features;
  bool outside_hull = false;
  std::vector<std::string> warnings;
  std::string fusion_fingerprint;
};

struct ServiceOptions {
  /// Outside the hull of existing stations: refuse (false) or answer with a warning (true).
  bool allow_extrapolation = false;
};

/// Read-only prediction service over loaded bundles and the station catalogue.
class WhatIfService {
 public:
  /// `stations` is the fused table of existing stations in raw units; its
  /// target is the observed demand.
  WhatIfService(std::map<std::string, ModelBundle> bundles, data::FeatureTable stations,
                std::optional<FusionSource> fusion = std::nullopt, ServiceOptions options = {});

  const std::map<std::string, ModelBundle>& bundles() const { return bundles_; }
  const data::FeatureTable& stations() const { return stations_; }
  const ModelBundle& bundle(const std::string& name) const;  // unfitted_model when unknown

  bool inside_hull(const spatial::Point& p) const;
  NeighbourhoodStats neighbourhood(const spatial::Point& at, double radius_m = kNeighbourhoodRadiusM,
                                   std::optional<std::string> exclude_id = std::nullopt) const;

  /// Raw feature values for a new station at `at` (auto-fuse) or completed
  /// from the nearest existing station (fixed-features with missing names).
  std::map<std::string, double> base_features(const WhatIfRequest& request,
                                              std::vector<std::string>* warnings = nullptr) const;

  WhatIfResponse whatif(const WhatIfRequest& request) const;

  /// Predictions for rows given as name -> value maps.
  std::vector<double> predict(const std::string& model, const std::vector<spatial::Point>& at,
                              const std::vector<std::map<std::string, double>>& rows) const;
  /// Prediction at an existing station using its stored features.
  double predict_station(const std::string& model, const std::string& station_id) const;

 private:
  std::map<std::string, ModelBundle> bundles_;
  data::FeatureTable stations_;
  std::optional<FusionSource> fusion_;
  ServiceOptions options_;
  spatial::SpatialIndex index_;
  spatial::Polygon hull_;
};

}  // namespace sdm::service
