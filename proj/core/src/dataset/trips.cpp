#include "sdm/dataset/trips.hpp"

#include <set>
#include <sstream>
#include <unordered_map>

#include "sdm/error.hpp"

namespace sdm::data {

TripKind parse_trip_kind(const std::string& text) {
  if (text == "return") return TripKind::return_trip;
  if (text == "one_way") return TripKind::one_way;
  return TripKind::other;
}

std::string to_string(TripKind kind) {
  switch (kind) {
    case TripKind::return_trip: return "return";
    case TripKind::one_way: return "one_way";
    case TripKind::other: return "other";
  }
  return "other";
}

CleaningResult clean_trips(const std::vector<TripRecord>& trips, const FusionConfig& cfg) {
  CleaningResult out;
  out.trips.reserve(trips.size());
  for (const auto& t : trips) {
    if (!(t.duration_h <= cfg.max_trip_duration_h)) {
      ++out.removed_duration;
    } else if (!(t.distance_km > cfg.min_trip_distance_km &&
                 t.distance_km <= cfg.max_trip_distance_km)) {
      ++out.removed_distance;
    } else if (t.kind != TripKind::return_trip) {
      ++out.removed_kind;
    } else {
      out.trips.push_back(t);
    }
  }
  return out;
}

std::vector<double> compute_demand(const std::vector<TripRecord>& trips,
                                   const std::vector<StationRecord>& stations,
                                   std::int64_t window_start, std::int64_t window_end) {
  require(window_end > window_start, ErrorCode::invalid_argument,
          "demand window end must be after its start");
  std::unordered_map<std::string, std::size_t> row;
  for (std::size_t i = 0; i < stations.size(); ++i) row.emplace(stations[i].station_id, i);

  std::vector<double> counts(stations.size(), 0.0);
  std::set<std::string> unknown;
  for (const auto& t : trips) {
    auto it = row.find(t.station_id);
    if (it == row.end()) {
      unknown.insert(t.station_id);
      continue;
    }
    counts[it->second] += 1.0;
  }
  if (!unknown.empty()) {
    std::ostringstream msg;
    msg << "trips reference unknown stations:";
    for (const auto& id : unknown) msg << ' ' << id;
    fail(ErrorCode::schema_mismatch, msg.str());
  }
  const double days = static_cast<double>(window_end - window_start) / 86400.0;
  const double months = days / kDaysPerMonth;
  for (auto& c : counts) c /= months;
  return counts;
}

}  // namespace sdm::data
