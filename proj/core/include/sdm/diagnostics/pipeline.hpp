#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdm/dataset/feature_table.hpp"
#include "sdm/forest/forest.hpp"
#include "sdm/linear/bandwidth.hpp"
#include "sdm/selection/select.hpp"
#include "sdm/spatial/kernel.hpp"

namespace sdm::diag {

enum class ModelKind { ols, gwr, mgwr, rf, rf_coords, grf };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);
/// "OLS Regression", "GWR", ... as printed in comparison tables.
std::string_view display_name(ModelKind kind);

/// Everything needed to train one model from a feature table.
struct ModelSpec {
  ModelKind kind = ModelKind::gwr;
  spatial::Kernel kernel = spatial::Kernel::bisquare;
  spatial::Bandwidth::Mode mode = spatial::Bandwidth::Mode::adaptive;
  linear::Criterion criterion = linear::Criterion::aicc;
  std::optional<spatial::Bandwidth> bandwidth;  // set = skip tuning
  forest::ForestParams forest;
  std::size_t grf_k = 0;  // 0 = default
  std::uint64_t seed = 1;
  bool select_features = false;
  selection::SelectionOptions selection;
};

struct FoldPrediction {
  Eigen::VectorXd predictions;
  std::vector<std::string> features;
  std::string bandwidth;  // tuned setting, empty for forests and OLS
};

/// Trains on the first table and predicts the rows of the second.
using Pipeline = std::function<FoldPrediction(const data::FeatureTable& train,
                                              const data::FeatureTable& test)>;

/// Optional LASSO selection on the training rows, then bandwidth tuning when
/// requested, then fit and predict. MGWR has no out-of-sample prediction and
/// throws `unsupported`.
Pipeline make_pipeline(const ModelSpec& spec);

}  // namespace sdm::diag
