#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sdm/dataset/feature_table.hpp"
#include "sdm/spatial/kernel.hpp"

namespace sdm::selection {

struct CollinearityThresholds {
  double vif = 10.0;
  double condition_number = 30.0;
  double variance_proportion = 0.5;
};

/// Local VIF and condition number at every station. Singular local designs
/// are reported as +inf in both.
struct CollinearityReport {
  std::vector<std::string> names;
  Eigen::MatrixXd vif;              // n x p
  Eigen::VectorXd condition_number; // n
  std::vector<std::string> flagged;
  std::vector<bool> flagged_mask;   // per feature

  /// Largest local VIF of feature j.
  double max_vif(std::size_t j) const;
};

/// Each location weights the data with the kernel; VIF_j = 1 / (1 - R^2_j)
/// from the weighted regression of feature j on the other features, and CN
/// is the singular value ratio of sqrt(W)[1, X] with unit-norm columns.
/// A feature is flagged by CN when a location has CN above the threshold and
/// the feature carries more than half of the variance of a component whose
/// condition index exceeds that threshold.
CollinearityReport local_collinearity(const data::FeatureTable& table, spatial::Kernel kernel,
                                      const spatial::Bandwidth& bandwidth,
                                      const CollinearityThresholds& thresholds = {});

/// Same computation for explicit weights at a single location (tests, tools).
struct LocalCollinearity {
  Eigen::VectorXd vif;
  double condition_number;
  std::vector<bool> cn_flags;  // per feature, from variance-decomposition proportions
};
LocalCollinearity collinearity_at(const Eigen::MatrixXd& X, const Eigen::VectorXd& weights,
                                  const CollinearityThresholds& thresholds = {});

}  // namespace sdm::selection
