#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "sdm/dataset/feature_table.hpp"
#include "sdm/forest/tree.hpp"

namespace sdm::forest {

struct ForestParams {
  std::size_t n_trees = 500;
  std::size_t mtry = 0;       // 0 = ceil(p / 3)
  std::size_t min_leaf = 5;
  std::size_t max_depth = 0;  // 0 = unlimited
  bool bootstrap = true;

  std::size_t resolved_mtry(std::size_t p) const;
  /// Throws invalid_argument for n_trees = 0, mtry > p or min_leaf = 0.
  void validate(std::size_t p) const;
  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct ForestModel {
  std::vector<Tree> trees;
  ForestParams params;
  std::uint64_t seed = 0;
  std::vector<std::string> feature_names;
  bool uses_coordinates = false;  // last two features are coord_x, coord_y
  double base_value = 0.0;        // training target mean
  std::vector<std::string> warnings;

  std::size_t features() const { return feature_names.size(); }
  double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
};

/// Trees are grown in parallel; tree t draws from derive_seed(seed, t), so
/// results do not depend on the worker count.
ForestModel rf_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const std::vector<std::string>& names, const ForestParams& params,
                   std::uint64_t seed, unsigned workers = 0);
/// With use_coordinates the projected station coordinates become two extra
/// features named coord_x and coord_y.
ForestModel rf_fit(const data::FeatureTable& table, const ForestParams& params, std::uint64_t seed,
                   bool use_coordinates = false);

/// Column count must match the training schema.
Eigen::VectorXd rf_predict(const ForestModel& model, const Eigen::MatrixXd& X);
/// Columns are matched by name; coordinates are appended when the model uses them.
Eigen::VectorXd rf_predict(const ForestModel& model, const data::FeatureTable& table);

/// Model design matrix for a table: named columns in training order, plus
/// coordinates for coordinate forests.
Eigen::MatrixXd model_design(const ForestModel& model, const data::FeatureTable& table);

}  // namespace sdm::forest
