#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sdm/dataset/fusion.hpp"
#include "sdm/dataset/records.hpp"

namespace sdm::data {

struct CleaningResult {
  std::vector<TripRecord> trips;
  std::size_t removed_duration = 0;
  std::size_t removed_distance = 0;
  std::size_t removed_kind = 0;
};

/// Keeps return trips with duration <= max_trip_duration and distance in
/// (min, max]. Rules are applied in order duration, distance, kind; a trip
/// is charged to the first rule it fails.
CleaningResult clean_trips(const std::vector<TripRecord>& trips, const FusionConfig& cfg);

inline constexpr double kDaysPerMonth = 30.4375;

/// Trips per month per station over [window_start, window_end) (unix seconds).
/// Output follows the order of `stations`. Throws listing unknown station ids.
std::vector<double> compute_demand(const std::vector<TripRecord>& trips,
                                   const std::vector<StationRecord>& stations,
                                   std::int64_t window_start, std::int64_t window_end);

}  // namespace sdm::data
