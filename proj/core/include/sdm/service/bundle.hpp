#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdm/dataset/feature_table.hpp"
#include "sdm/diagnostics/pipeline.hpp"
#include "sdm/forest/forest.hpp"
#include "sdm/forest/grf.hpp"
#include "sdm/linear/gwr.hpp"
#include "sdm/linear/mgwr.hpp"
#include "sdm/linear/ols.hpp"

namespace sdm::service {

inline constexpr int kBundleFormatVersion = 1;
inline constexpr const char* kBundleFormat = "sdm-model-bundle";

/// A fitted model plus everything needed to score raw feature rows.
/// Linear models are fitted on standardized data; `standardization` maps raw
/// feature values onto that scale and the target back to trips/month.
struct ModelBundle {
  diag::ModelKind kind = diag::ModelKind::ols;
  std::string toolkit_version;
  std::string fit_timestamp;  // UTC, ISO 8601
  std::uint64_t seed = 0;
  std::vector<data::Column> features;
  data::Column target;
  std::optional<data::Standardization> standardization;
  std::string fusion_fingerprint;
  nlohmann::json settings;  // kernel, bandwidth, criterion, forest params as fitted

  // Training stations in raw units.
  std::vector<std::string> station_ids;
  std::vector<spatial::Point> locations;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  std::optional<linear::OlsFit> ols;
  std::optional<linear::GwrFit> gwr;
  std::optional<linear::MgwrFit> mgwr;
  std::optional<forest::ForestModel> forest;
  std::optional<forest::GrfModel> grf;

  std::vector<std::string> feature_names() const;
  /// Predictions in target units for raw feature rows (columns in
  /// feature_names() order). MGWR throws `unsupported`.
  Eigen::VectorXd predict(const std::vector<spatial::Point>& at, const Eigen::MatrixXd& raw_x) const;
  /// In-sample fitted values in target units (every kind, MGWR included).
  Eigen::VectorXd fitted() const;
};

/// Fits spec on the table. `fit_timestamp` is taken from the clock unless given.
ModelBundle fit_bundle(const data::FeatureTable& table, const diag::ModelSpec& spec,
                       const std::string& fusion_fingerprint = "",
                       std::optional<std::string> fit_timestamp = std::nullopt);

nlohmann::json to_json(const ModelBundle& bundle);
/// Rejects documents with a different format or format_version.
ModelBundle bundle_from_json(const nlohmann::json& j);

std::string serialize(const ModelBundle& bundle);
ModelBundle deserialize(const std::string& text);
void save_bundle(const std::filesystem::path& path, const ModelBundle& bundle);
ModelBundle load_bundle(const std::filesystem::path& path);

}  // namespace sdm::service
