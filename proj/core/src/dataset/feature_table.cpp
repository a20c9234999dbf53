#include "sdm/dataset/feature_table.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "sdm/error.hpp"

namespace sdm::data {

std::vector<std::string> FeatureTable::column_names() const {
  std::vector<std::string> out;
  out.reserve(columns.size());
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

std::optional<std::size_t> FeatureTable::find_column(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].name == name) return j;
  }
  return std::nullopt;
}

std::size_t FeatureTable::column_index(const std::string& name) const {
  if (auto j = find_column(name)) return *j;
  fail(ErrorCode::schema_mismatch, "feature table has no column '" + name + "'");
}

void FeatureTable::validate() const {
  const auto n = static_cast<std::size_t>(X.rows());
  require(static_cast<std::size_t>(y.size()) == n && locations.size() == n &&
              station_ids.size() == n,
          ErrorCode::schema_mismatch, "feature table row counts disagree");
  require(columns.size() == static_cast<std::size_t>(X.cols()), ErrorCode::schema_mismatch,
          "feature table column metadata does not match X");
  std::set<std::string> names;
  for (const auto& c : columns) {
    require(names.insert(c.name).second, ErrorCode::schema_mismatch,
            "duplicate column name '" + c.name + "'");
  }
  require(X.allFinite() && y.allFinite(), ErrorCode::schema_mismatch,
          "feature table contains missing or non-finite values");
}

FeatureTable FeatureTable::select_columns(const std::vector<std::string>& names) const {
  FeatureTable out;
  out.station_ids = station_ids;
  out.locations = locations;
  out.y = y;
  out.target = target;
  out.X.resize(X.rows(), static_cast<Eigen::Index>(names.size()));
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < names.size(); ++k) {
    const std::size_t j = column_index(names[k]);
    idx.push_back(j);
    out.columns.push_back(columns[j]);
    out.X.col(static_cast<Eigen::Index>(k)) = X.col(static_cast<Eigen::Index>(j));
  }
  if (standardization) {
    Standardization s;
    s.y_mean = standardization->y_mean;
    s.y_std = standardization->y_std;
    s.x_mean.resize(static_cast<Eigen::Index>(idx.size()));
    s.x_std.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      s.x_mean(static_cast<Eigen::Index>(k)) = standardization->x_mean(static_cast<Eigen::Index>(idx[k]));
      s.x_std(static_cast<Eigen::Index>(k)) = standardization->x_std(static_cast<Eigen::Index>(idx[k]));
    }
    out.standardization = s;
  }
  return out;
}

FeatureTable FeatureTable::select_rows(const std::vector<std::size_t>& rows) const {
  FeatureTable out;
  out.columns = columns;
  out.target = target;
  out.standardization = standardization;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(rows[k]);
    require(rows[k] < this->rows(), ErrorCode::invalid_argument, "row index out of range");
    out.X.row(static_cast<Eigen::Index>(k)) = X.row(r);
    out.y(static_cast<Eigen::Index>(k)) = y(r);
    out.station_ids.push_back(station_ids[rows[k]]);
    out.locations.push_back(locations[rows[k]]);
  }
  return out;
}

FeatureTable FeatureTable::with_coordinates() const {
  FeatureTable out = *this;
  const Eigen::Index p = X.cols();
  out.X.conservativeResize(X.rows(), p + 2);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    out.X(i, p) = locations[static_cast<std::size_t>(i)].x;
    out.X(i, p + 1) = locations[static_cast<std::size_t>(i)].y;
  }
  out.columns.push_back({"coord_x", "m", "projected easting"});
  out.columns.push_back({"coord_y", "m", "projected northing"});
  if (out.standardization) {
    // Coordinates join unscaled.
    auto& s = *out.standardization;
    s.x_mean.conservativeResize(p + 2);
    s.x_std.conservativeResize(p + 2);
    s.x_mean.tail(2).setZero();
    s.x_std.tail(2).setOnes();
  }
  return out;
}

namespace {

std::pair<double, double> mean_std(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double mean = v.mean();
  const double var = (v.array() - mean).square().mean();
  return {mean, std::sqrt(var)};
}

}  // namespace

FeatureTable standardize(const FeatureTable& table) {
  table.validate();
  FeatureTable out = table;
  Standardization s;
  const Eigen::Index p = table.X.cols();
  s.x_mean.resize(p);
  s.x_std.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    auto [mean, sd] = mean_std(table.X.col(j));
    if (!(sd > 0.0)) {
      fail(ErrorCode::invalid_argument,
           "cannot standardize zero-variance column '" + table.columns[static_cast<std::size_t>(j)].name + "'");
    }
    s.x_mean(j) = mean;
    s.x_std(j) = sd;
    out.X.col(j) = (table.X.col(j).array() - mean) / sd;
  }
  auto [ymean, ysd] = mean_std(table.y);
  if (!(ysd > 0.0)) fail(ErrorCode::invalid_argument, "cannot standardize a constant target");
  s.y_mean = ymean;
  s.y_std = ysd;
  out.y = (table.y.array() - ymean) / ysd;

  if (table.standardization) {
    // Compose with the existing transform so inverse() returns raw units.
    const auto& prev = *table.standardization;
    s.x_mean = prev.x_mean.array() + prev.x_std.array() * s.x_mean.array();
    s.x_std = prev.x_std.array() * s.x_std.array();
    s.y_mean = prev.y_mean + prev.y_std * s.y_mean;
    s.y_std = prev.y_std * s.y_std;
  }
  out.standardization = s;
  return out;
}

FeatureTable destandardize(const FeatureTable& table) {
  require(table.standardization.has_value(), ErrorCode::invalid_argument,
          "table carries no standardization parameters");
  const auto& s = *table.standardization;
  FeatureTable out = table;
  for (Eigen::Index j = 0; j < table.X.cols(); ++j) {
    out.X.col(j) = table.X.col(j).array() * s.x_std(j) + s.x_mean(j);
  }
  out.y = table.y.array() * s.y_std + s.y_mean;
  out.standardization.reset();
  return out;
}

Eigen::MatrixXd apply_standardization(const Standardization& s, const Eigen::MatrixXd& raw_x) {
  require(raw_x.cols() == s.x_mean.size(), ErrorCode::schema_mismatch,
          "row width does not match the stored standardization");
  Eigen::MatrixXd out(raw_x.rows(), raw_x.cols());
  for (Eigen::Index j = 0; j < raw_x.cols(); ++j) {
    out.col(j) = (raw_x.col(j).array() - s.x_mean(j)) / s.x_std(j);
  }
  return out;
}

double unstandardize_target(const Standardization& s, double value) {
  return value * s.y_std + s.y_mean;
}

}  // namespace sdm::data
