#include "sdm/service/whatif.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sdm/error.hpp"

namespace sdm::service {

std::string_view to_string(FeatureMode m) {
  return m == FeatureMode::auto_fuse ? "auto-fuse" : "fixed-features";
}

FeatureMode parse_feature_mode(std::string_view text) {
  if (text == "auto-fuse") return FeatureMode::auto_fuse;
  if (text == "fixed-features") return FeatureMode::fixed_features;
  fail(ErrorCode::invalid_argument, "unknown feature mode '" + std::string(text) +
                                        "' (expected auto-fuse or fixed-features)");
}

WhatIfService::WhatIfService(std::map<std::string, ModelBundle> bundles, data::FeatureTable stations,
                             std::optional<FusionSource> fusion, ServiceOptions options)
    : bundles_(std::move(bundles)),
      stations_(stations.standardization ? data::destandardize(stations) : std::move(stations)),
      fusion_(std::move(fusion)),
      options_(options),
      index_(stations_.locations) {
  require(!bundles_.empty(), ErrorCode::unfitted_model, "service needs at least one model bundle");
  stations_.validate();
  if (stations_.rows() >= 3) hull_ = spatial::convex_hull(stations_.locations);
}

const ModelBundle& WhatIfService::bundle(const std::string& name) const {
  const auto it = bundles_.find(name);
  if (it == bundles_.end()) {
    std::string known;
    for (const auto& [k, v] : bundles_) known += (known.empty() ? "" : ", ") + k;
    fail(ErrorCode::unfitted_model, "unknown model '" + name + "' (loaded: " + known + ")");
  }
  return it->second;
}

bool WhatIfService::inside_hull(const spatial::Point& p) const {
  if (hull_.size() < 3) return true;
  return spatial::contains_convex(hull_, p, 1e-6);
}

NeighbourhoodStats WhatIfService::neighbourhood(const spatial::Point& at, double radius_m,
                                                std::optional<std::string> exclude_id) const {
  NeighbourhoodStats s;
  s.radius_m = radius_m;
  const auto supply_col = stations_.find_column(kSupplyFeature);
  double supply_sum = 0.0;
  double demand_sum = 0.0;
  std::optional<std::size_t> largest;
  for (const auto& nb : index_.within(at, radius_m)) {
    if (exclude_id && stations_.station_ids[nb.id] == *exclude_id) continue;
    ++s.station_count;
    const double demand = stations_.y(static_cast<Eigen::Index>(nb.id));
    demand_sum += demand;
    if (!supply_col) continue;
    const double supply = stations_.X(static_cast<Eigen::Index>(nb.id), static_cast<Eigen::Index>(*supply_col));
    supply_sum += supply;
    if (!largest) {
      largest = nb.id;
      continue;
    }
    const double ls = stations_.X(static_cast<Eigen::Index>(*largest), static_cast<Eigen::Index>(*supply_col));
    const double ld = stations_.y(static_cast<Eigen::Index>(*largest));
    if (supply > ls || (supply == ls && demand > ld) || (supply == ls && demand == ld && nb.id < *largest)) {
      largest = nb.id;
    }
  }
  if (s.station_count > 0) {
    const double c = static_cast<double>(s.station_count);
    s.mean_demand_trips_per_month = demand_sum / c;
    if (supply_col) s.mean_supply_cars = supply_sum / c;
  }
  if (largest) {
    s.largest_station_id = stations_.station_ids[*largest];
    s.largest_supply_cars = stations_.X(static_cast<Eigen::Index>(*largest), static_cast<Eigen::Index>(*supply_col));
    s.largest_demand_trips_per_month = stations_.y(static_cast<Eigen::Index>(*largest));
  }
  return s;
}

std::map<std::string, double> WhatIfService::base_features(const WhatIfRequest& request,
                                                           std::vector<std::string>* warnings) const {
  std::map<std::string, double> out;
  if (request.mode == FeatureMode::auto_fuse) {
    require(fusion_.has_value(), ErrorCode::invalid_argument,
            "auto-fuse needs the raw data layers (start the service with a data directory) or use "
            "mode fixed-features");
    const std::string fp = fusion_->config.fingerprint();
    for (const auto& [name, b] : bundles_) {
      require(b.fusion_fingerprint.empty() || b.fusion_fingerprint == fp, ErrorCode::schema_mismatch,
              "model '" + name + "' was trained with a different fusion configuration");
    }
    std::vector<data::StationRecord> stations = fusion_->stations;
    stations.push_back({"__whatif_candidate__", request.location, 1.0});
    const auto fused = data::fuse_features(stations, fusion_->pois, fusion_->census, fusion_->households,
                                           fusion_->config);
    const auto row = static_cast<Eigen::Index>(stations.size() - 1);
    for (std::size_t j = 0; j < fused.table.features(); ++j) {
      out[fused.table.columns[j].name] = fused.table.X(row, static_cast<Eigen::Index>(j));
    }
    return out;
  }

  // Fixed features: explicit values, completed from the nearest existing station.
  std::set<std::string> known;
  for (const auto& c : stations_.columns) known.insert(c.name);
  for (const auto& [name, b] : bundles_) {
    for (const auto& c : b.features) known.insert(c.name);
  }
  for (const auto& [name, value] : request.features) {
    require(known.count(name), ErrorCode::schema_mismatch, "unknown feature '" + name + "'");
    require(std::isfinite(value), ErrorCode::schema_mismatch, "feature '" + name + "' is not finite");
  }
  out = request.features;
  const auto nearest = index_.nearest(request.location).id;
  std::vector<std::string> filled;
  for (std::size_t j = 0; j < stations_.features(); ++j) {
    const auto& name = stations_.columns[j].name;
    if (out.count(name)) continue;
    out[name] = stations_.X(static_cast<Eigen::Index>(nearest), static_cast<Eigen::Index>(j));
    if (name != kSupplyFeature) filled.push_back(name);  // the curve overrides supply anyway
  }
  if (warnings && !filled.empty()) {
    std::string list;
    for (const auto& f : filled) list += (list.empty() ? "" : ", ") + f;
    warnings->push_back("features taken from nearest station " + stations_.station_ids[nearest] + ": " + list);
  }
  return out;
}

std::vector<double> WhatIfService::predict(const std::string& model, const std::vector<spatial::Point>& at,
                                           const std::vector<std::map<std::string, double>>& rows) const {
  const ModelBundle& b = bundle(model);
  require(b.kind != diag::ModelKind::mgwr, ErrorCode::unsupported,
          "MGWR does not support out-of-sample prediction");
  require(at.size() == rows.size(), ErrorCode::schema_mismatch, "locations and rows differ in count");
  const auto names = b.feature_names();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      const auto it = rows[i].find(names[j]);
      require(it != rows[i].end(), ErrorCode::schema_mismatch,
              "row " + std::to_string(i) + " lacks feature '" + names[j] + "'");
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = it->second;
    }
  }
  const Eigen::VectorXd p = b.predict(at, X);
  return {p.data(), p.data() + p.size()};
}

double WhatIfService::predict_station(const std::string& model, const std::string& station_id) const {
  const ModelBundle& b = bundle(model);
  const auto it = std::find(b.station_ids.begin(), b.station_ids.end(), station_id);
  require(it != b.station_ids.end(), ErrorCode::schema_mismatch,
          "station '" + station_id + "' is not a training station of model '" + model + "'");
  const auto i = static_cast<Eigen::Index>(it - b.station_ids.begin());
  const Eigen::MatrixXd row = b.X.row(i);
  return b.predict({b.locations[static_cast<std::size_t>(i)]}, row)(0);
}

WhatIfResponse WhatIfService::whatif(const WhatIfRequest& request) const {
  require(std::isfinite(request.location.x) && std::isfinite(request.location.y), ErrorCode::schema_mismatch,
          "location must be finite projected coordinates");
  require(request.supply_max >= request.supply_min, ErrorCode::schema_mismatch,
          "supply range is empty");
  require(request.supply_max - request.supply_min < 10000, ErrorCode::schema_mismatch, "supply range too long");

  WhatIfResponse r;
  r.location = request.location;
  r.mode = request.mode;
  r.outside_hull = !inside_hull(request.location);
  if (r.outside_hull) {
    require(options_.allow_extrapolation, ErrorCode::out_of_domain,
            "location lies outside the hull of existing stations; predictions would extrapolate");
    r.warnings.push_back("location lies outside the hull of existing stations");
  }

  std::vector<std::string> models = request.models;
  if (models.empty()) {
    for (const auto& [name, b] : bundles_) {
      if (b.kind != diag::ModelKind::mgwr) models.push_back(name);
    }
  }
  for (const auto& m : models) {
    require(bundle(m).kind != diag::ModelKind::mgwr, ErrorCode::unsupported,
            "MGWR does not support out-of-sample prediction; it cannot produce a what-if curve");
  }

  r.base_features = base_features(request, &r.warnings);
  if (fusion_) r.fusion_fingerprint = fusion_->config.fingerprint();
  r.neighbourhood = neighbourhood(request.location);
  for (std::size_t s = request.supply_min; s <= request.supply_max; ++s) r.supply_cars.push_back(static_cast<double>(s));

  const std::vector<spatial::Point> at(r.supply_cars.size(), request.location);
  for (const auto& m : models) {
    const ModelBundle& b = bundle(m);
    const auto names = b.feature_names();
    if (std::find(names.begin(), names.end(), kSupplyFeature) == names.end()) {
      r.warnings.push_back("model '" + m + "' does not use " + kSupplyFeature + "; its curve is flat");
    }
    std::vector<std::map<std::string, double>> rows(r.supply_cars.size(), r.base_features);
    for (std::size_t k = 0; k < rows.size(); ++k) rows[k][kSupplyFeature] = r.supply_cars[k];
    r.curves.push_back({m, std::string(diag::to_string(b.kind)), predict(m, at, rows)});
  }
  return r;
}

}  // namespace sdm::service
