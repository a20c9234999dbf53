#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sdm/dataset/feature_table.hpp"
#include "sdm/linear/local_solver.hpp"
#include "sdm/spatial/kernel.hpp"

namespace sdm::linear {

/// Geographically weighted regression fitted at every calibration location.
/// Column 0 of beta/se/tvalues is the local intercept.
struct GwrFit {
  spatial::Kernel kernel = spatial::Kernel::bisquare;
  spatial::Bandwidth bandwidth;
  std::vector<std::string> names;       // "intercept", then features
  Eigen::VectorXd resolved_bandwidth;   // meters, per location
  Eigen::MatrixXd beta;                 // n x (p+1)
  Eigen::MatrixXd se;
  Eigen::MatrixXd tvalues;
  Eigen::VectorXd hat_diag;
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;
  Eigen::VectorXd y;
  double trS = 0.0;
  double rss = 0.0;
  double sigma_hat = 0.0;  // pooled, sqrt(RSS / (n - trS))
  double aicc = 0.0;

  // Retained training data for out-of-sample calibration.
  Eigen::MatrixXd X;
  std::vector<spatial::Point> locations;
  std::shared_ptr<const LocalContext> context;

  std::size_t rows() const { return static_cast<std::size_t>(beta.rows()); }
  /// Row i of the hat matrix S (maps y to fitted values).
  Eigen::RowVectorXd hat_row(std::size_t i) const;
};

GwrFit gwr_fit(const data::FeatureTable& table, spatial::Kernel kernel,
               const spatial::Bandwidth& bandwidth);
GwrFit gwr_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               const std::vector<spatial::Point>& locations, const std::vector<std::string>& names,
               spatial::Kernel kernel, const spatial::Bandwidth& bandwidth,
               std::shared_ptr<const LocalContext> context = nullptr);

/// Out-of-sample predictions; rows whose local design is singular are
/// reported through `ok` / `errors` while the others are still predicted.
struct GwrPrediction {
  Eigen::VectorXd values;
  std::vector<bool> ok;
  std::vector<std::string> errors;
};

GwrPrediction gwr_predict(const GwrFit& fit, const std::vector<spatial::Point>& locations,
                          const Eigen::MatrixXd& X);

/// Local coefficients calibrated at an arbitrary point from the training data.
std::optional<Eigen::VectorXd> gwr_local_beta(const GwrFit& fit, const spatial::Point& at);

}  // namespace sdm::linear
