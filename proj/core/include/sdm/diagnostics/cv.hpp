#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "sdm/dataset/feature_table.hpp"
#include "sdm/diagnostics/pipeline.hpp"

namespace sdm::diag {

struct FoldResult {
  std::size_t fold = 0;
  std::vector<std::size_t> test_rows;
  double mse = 0.0;  // L_i
  std::vector<std::string> features;
  std::string bandwidth;
};

struct CVResult {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::size_t>> folds;
  std::vector<FoldResult> fold_results;
  Eigen::VectorXd predictions;  // out-of-fold, in table row order
  double cv_mean = 0.0;         // mean of per-fold MSE
  double oos_rmse = 0.0;        // pooled over all held-out rows
  double oos_r2 = 0.0;
};

/// Seeded k-fold cross-validation. Each fold's pipeline sees only its
/// training rows. A failing fold aborts with its id in the message.
CVResult kfold_cv(const data::FeatureTable& table, const Pipeline& pipeline, std::size_t k = 10,
                  std::uint64_t seed = 1, unsigned workers = 0);

}  // namespace sdm::diag
