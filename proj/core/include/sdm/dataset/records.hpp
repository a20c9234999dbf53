#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdm/spatial/geometry.hpp"

namespace sdm::data {

enum class TripKind { return_trip, one_way, other };

TripKind parse_trip_kind(const std::string& text);
std::string to_string(TripKind kind);

struct TripRecord {
  std::string station_id;
  std::int64_t start_time = 0;  // unix seconds
  double duration_h = 0.0;
  double distance_km = 0.0;
  TripKind kind = TripKind::return_trip;
};

struct StationRecord {
  std::string station_id;
  spatial::Point location;
  double vehicles = 0.0;
};

struct PoiRecord {
  spatial::Point location;
  std::string category;
};

/// Point layer with named numeric attributes (census cells, survey households).
struct AttributeLayer {
  std::vector<std::string> attributes;
  std::vector<spatial::Point> points;
  std::vector<std::vector<double>> values;  // values[point][attribute]

  std::size_t size() const { return points.size(); }
};

}  // namespace sdm::data
