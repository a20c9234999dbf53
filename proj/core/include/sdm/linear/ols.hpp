#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sdm/dataset/feature_table.hpp"

namespace sdm::linear {

/// Global least squares with an intercept. beta(0) is the intercept.
struct OlsFit {
  std::vector<std::string> names;  // "intercept", then feature names
  Eigen::VectorXd beta;
  Eigen::VectorXd se;
  Eigen::VectorXd tvalues;
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;
  Eigen::VectorXd hat_diag;
  Eigen::VectorXd y;
  double rss = 0.0;
  double sigma_hat = 0.0;  // sqrt(RSS / (n - p - 1))
  double trS = 0.0;        // = p + 1
  double aicc = 0.0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

/// Throws rank_deficient naming a dependent column set.
OlsFit ols_fit(const data::FeatureTable& table);
OlsFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               const std::vector<std::string>& names);

}  // namespace sdm::linear
