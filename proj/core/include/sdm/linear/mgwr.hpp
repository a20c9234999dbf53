#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sdm/dataset/feature_table.hpp"
#include "sdm/linear/bandwidth.hpp"
#include "sdm/spatial/kernel.hpp"

namespace sdm::linear {

struct MgwrOptions {
  spatial::Kernel kernel = spatial::Kernel::bisquare;
  Criterion criterion = Criterion::aicc;
  double tolerance = 1e-5;             // score-of-change threshold
  std::size_t max_iterations = 200;
  std::size_t search_every_until = 10; // re-search each iteration up to here...
  std::size_t search_period = 5;       // ...then every `search_period`-th
};

struct BackfitStep {
  std::size_t iteration;
  double rss;
  double score_of_change;  // |RSS_t - RSS_{t-1}| / RSS_t
  std::vector<std::size_t> bandwidths;
};

/// Multiscale GWR calibrated by backfitting; one adaptive bandwidth per term.
/// Term 0 is the intercept.
struct MgwrFit {
  spatial::Kernel kernel = spatial::Kernel::bisquare;
  Criterion criterion = Criterion::aicc;
  std::vector<std::string> names;
  std::vector<std::size_t> bandwidths;      // neighbours per term
  std::vector<double> median_bandwidth_km;  // resolved distance per term
  Eigen::MatrixXd beta;                     // n x (p+1)
  Eigen::MatrixXd se;
  Eigen::MatrixXd tvalues;
  Eigen::MatrixXd partial_fits;             // f_j columns; fitted = row sums
  Eigen::VectorXd enp;                      // trace(R_j) per term
  Eigen::VectorXd hat_diag;                 // diag of S = sum_j R_j
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;
  Eigen::VectorXd y;
  double trS = 0.0;
  double rss = 0.0;
  double sigma_hat = 0.0;
  double aicc = 0.0;
  std::size_t initial_bandwidth = 0;  // GWR start
  bool converged = false;
  std::vector<BackfitStep> trace;
};

/// Requires a standardized table (X columns and y at mean 0, std 1) with
/// n <= 5000 so the per-term hat matrices fit in memory.
MgwrFit mgwr_fit(const data::FeatureTable& table, const MgwrOptions& options = {});

}  // namespace sdm::linear
