#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "sdm/dataset/feature_table.hpp"
#include "sdm/forest/forest.hpp"

namespace sdm::forest {

/// base_value + phi.sum() equals the model output.
struct ShapValues {
  Eigen::VectorXd phi;
  double base_value = 0.0;
};

/// Exact path-dependent TreeSHAP for one tree over p features.
ShapValues tree_shap(const Tree& tree, std::size_t p, const Eigen::Ref<const Eigen::RowVectorXd>& x);
/// Forest attribution: per-tree values averaged over trees.
ShapValues tree_shap(const ForestModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x);

struct ShapSummary {
  std::vector<std::string> names;
  Eigen::VectorXd importance;      // mean |phi| per feature
  std::vector<std::size_t> ranking;  // feature indices by decreasing importance
  Eigen::MatrixXd phi;             // rows x features
  Eigen::MatrixXd values;          // model inputs, same shape
  Eigen::VectorXd base_values;
  std::vector<std::string> row_ids;
};

ShapSummary shap_summary(const ForestModel& model, const data::FeatureTable& table);

/// CSV: rank,feature,mean_abs_shap,share
void write_shap_importance(const std::filesystem::path& path, const ShapSummary& summary);
/// CSV with one line per (row, feature): station_id,feature,value,shap
void write_shap_beeswarm(const std::filesystem::path& path, const ShapSummary& summary);

}  // namespace sdm::forest
