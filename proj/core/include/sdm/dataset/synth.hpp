#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "sdm/dataset/feature_table.hpp"
#include "sdm/dataset/records.hpp"

namespace sdm::data {

enum class Layout { uniform, clustered, two_cluster };

/// Coefficient surface beta(u, v) over the layout extent.
struct Surface {
  enum class Kind { constant, linear, step };
  Kind kind = Kind::constant;
  double value = 1.0;   // constant value; linear: value at west edge; step: west value
  double other = 1.0;   // linear: value at east edge; step: east value
  double split_x = 0.0; // step boundary in meters (relative to extent origin)

  static Surface constant(double v) { return {Kind::constant, v, v, 0.0}; }
  static Surface linear(double west, double east) { return {Kind::linear, west, east, 0.0}; }
  static Surface step(double west, double east, double split_x) {
    return {Kind::step, west, east, split_x};
  }

  double at(double x, double extent) const;
};

struct SynthConfig {
  std::size_t n = 500;
  Layout layout = Layout::uniform;
  double extent_m = 100'000.0;          // square side; two_cluster: centre separation
  double cluster_spread_m = 10'000.0;   // std of clustered / two_cluster blobs
  std::size_t clusters = 6;             // clustered layout only
  Surface intercept = Surface::constant(0.0);
  std::vector<Surface> surfaces;        // one per feature
  std::vector<std::string> names;       // optional; default x1..xp
  double sigma = 0.0;
  double feature_mean = 0.0;            // X ~ N(feature_mean, 1)
};

struct SynthResult {
  FeatureTable table;
  Eigen::MatrixXd beta;  // n x (p+1): intercept then features, true local values
  double sigma = 0.0;
};

/// y_i = beta_0(u_i) + sum_j beta_j(u_i) X_ij + eps_i, X ~ N(feature_mean, 1), eps ~ N(0, sigma^2).
/// Deterministic for a given seed. Throws when n < p + 2.
SynthResult synth_generate(const SynthConfig& cfg, std::uint64_t seed);

/// Named configurations: "two-cluster", "multiscale", "uniform", "saturating-supply".
SynthConfig synth_preset(const std::string& name);

/// Saturating supply response: demand = 20 + 6 x1 + 3 x2 + slope * min(supply, knee) + eps,
/// supply uniform on 1..max_supply (integers). Column "supply_cars" is last.
struct SaturatingConfig {
  std::size_t n = 600;
  double extent_m = 50'000.0;
  double slope = 4.0;
  int knee = 6;
  int max_supply = 12;
  double sigma = 0.5;
};
SynthResult synth_saturating(const SaturatingConfig& cfg, std::uint64_t seed);

/// Raw layers for exercising fusion end to end.
struct RawLayers {
  std::vector<StationRecord> stations;
  std::vector<PoiRecord> pois;
  AttributeLayer census;
  AttributeLayer households;
  std::vector<TripRecord> trips;
  std::int64_t window_start = 0;
  std::int64_t window_end = 0;
};

struct RawSynthConfig {
  std::size_t stations = 120;
  std::size_t pois = 2000;
  std::size_t census_cells = 3000;
  std::size_t households = 400;
  double extent_m = 20'000.0;
  double origin_x = 2'600'000.0;  // projected, Swiss-like magnitudes
  double origin_y = 1'200'000.0;
  double trips_per_car_month = 8.0;
  double window_days = 423.0;
};

RawLayers synth_raw(const RawSynthConfig& cfg, std::uint64_t seed);

}  // namespace sdm::data
