#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "sdm/spatial/geometry.hpp"

namespace sdm::data {

struct Column {
  std::string name;
  std::string unit;
  std::string provenance;  // aggregation rule that produced the column
};

/// Per-column (mean, std) of X and y; population (n-denominator) std.
struct Standardization {
  Eigen::VectorXd x_mean;
  Eigen::VectorXd x_std;
  double y_mean = 0.0;
  double y_std = 1.0;
};

/// Station-indexed model input: features, target and projected locations.
struct FeatureTable {
  std::vector<std::string> station_ids;
  std::vector<spatial::Point> locations;
  std::vector<Column> columns;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Column target{"demand_trips_per_month", "trips/month", "trip count over window"};
  std::optional<Standardization> standardization;

  std::size_t rows() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t features() const { return static_cast<std::size_t>(X.cols()); }

  std::vector<std::string> column_names() const;
  /// Index of a named column; throws schema_mismatch when absent.
  std::size_t column_index(const std::string& name) const;
  std::optional<std::size_t> find_column(const std::string& name) const;

  /// Throws when shapes disagree, a value is non-finite or names repeat.
  void validate() const;

  FeatureTable select_columns(const std::vector<std::string>& names) const;
  FeatureTable select_rows(const std::vector<std::size_t>& rows) const;
  /// Appends projected x and y as ordinary feature columns "coord_x", "coord_y".
  FeatureTable with_coordinates() const;
};

/// z-scores every X column and y; throws naming the first zero-variance column.
FeatureTable standardize(const FeatureTable& table);
/// Undoes standardize() using the stored parameters.
FeatureTable destandardize(const FeatureTable& table);

/// Applies stored feature scaling to raw rows (columns in the same order).
Eigen::MatrixXd apply_standardization(const Standardization& s, const Eigen::MatrixXd& raw_x);
/// Maps a standardized target back to raw units.
double unstandardize_target(const Standardization& s, double value);

}  // namespace sdm::data
