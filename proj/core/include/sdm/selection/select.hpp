#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sdm/dataset/feature_table.hpp"
#include "sdm/selection/collinearity.hpp"
#include "sdm/selection/lasso.hpp"

namespace sdm::selection {

enum class SelectedBy { lasso, manual, not_selected, removed_collinear };

std::string_view to_string(SelectedBy s);
/// Label used in printed reports: "LASSO", "Manually", "Not selected".
std::string_view display_label(SelectedBy s);

struct SelectionOptions {
  std::size_t k_folds = 10;
  std::uint64_t seed = 1;
  std::vector<std::string> manual_include;
  std::vector<std::string> manual_exclude;
  std::size_t path_length = 100;
  double path_ratio = 1e-3;
  LassoOptions lasso;
};

struct FeatureDecision {
  std::string feature;
  SelectedBy selected_by = SelectedBy::not_selected;
  double coefficient = 0.0;  // at the chosen lambda
  double max_vif = 0.0;      // NaN until screened
};

struct SelectionResult {
  double lambda = 0.0;
  std::vector<double> lambdas;
  std::vector<double> cv_mse;  // mean over folds, per lambda
  std::vector<FeatureDecision> decisions;

  std::vector<std::string> selected() const;
};

/// Cross-validated LASSO over a log-spaced path, union manual includes,
/// minus manual excludes. The table must be standardized.
SelectionResult lasso_select(const data::FeatureTable& table, const SelectionOptions& options);

/// Convenience form returning only the selected names.
std::vector<std::string> lasso_select(const data::FeatureTable& table, std::size_t k_folds,
                                      std::uint64_t seed,
                                      const std::vector<std::string>& manual_include,
                                      const std::vector<std::string>& manual_exclude);

/// Repeatedly drops the flagged, non-manual feature with the smallest absolute
/// LASSO coefficient until local screening flags nothing removable.
void screen_collinearity(const data::FeatureTable& table, SelectionResult& result,
                         spatial::Kernel kernel, const spatial::Bandwidth& bandwidth,
                         const CollinearityThresholds& thresholds = {});

/// CSV: feature,selected_by,max_local_vif,lambda
void write_selection_report(const std::filesystem::path& path, const SelectionResult& result);

}  // namespace sdm::selection
