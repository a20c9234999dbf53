#pragma once

#include <cstdint>
#include <vector>

#include "sdm/dataset/feature_table.hpp"
#include "sdm/diagnostics/cv.hpp"
#include "sdm/diagnostics/pipeline.hpp"
#include "sdm/diagnostics/report.hpp"

namespace sdm::diag {

struct EvaluationOptions {
  std::size_t k_folds = 10;
  std::uint64_t seed = 1;
  std::size_t moran_permutations = 999;
  std::size_t moran_neighbours = 8;
  bool cross_validate = true;
};

/// In-sample fit statistics (linear models, on the standardized table so
/// AICc values are comparable across models), residual Moran p and pooled
/// out-of-sample metrics. Forest Moran p uses out-of-fold residuals.
ComparisonRow evaluate_model(const data::FeatureTable& table, const ModelSpec& spec,
                             const EvaluationOptions& options = {});
/// Failed models are kept as rows with `error` set.
std::vector<ComparisonRow> evaluate_models(const data::FeatureTable& table,
                                           const std::vector<ModelSpec>& specs,
                                           const EvaluationOptions& options = {});

struct AblationConfig {
  spatial::Bandwidth::Mode mode = spatial::Bandwidth::Mode::adaptive;
  linear::Criterion criterion = linear::Criterion::aicc;
  spatial::Kernel kernel = spatial::Kernel::bisquare;
};

/// All mode x criterion x kernel combinations for the given kernels.
std::vector<AblationConfig> full_grid(const std::vector<spatial::Kernel>& kernels);

/// GWR under each configuration, sorted by out-of-sample R² ascending
/// (failed rows last).
std::vector<ComparisonRow> ablate(const data::FeatureTable& table, const std::vector<AblationConfig>& grid,
                                  const EvaluationOptions& options = {});

}  // namespace sdm::diag
