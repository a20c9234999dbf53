#pragma once

#include <Eigen/Dense>
#include <vector>

namespace sdm::selection {

struct LassoOptions {
  double tolerance = 1e-7;        // max absolute coefficient change per sweep
  double kkt_tolerance = 1e-8;    // max stationarity violation |x_j^T r| vs lambda
  std::size_t max_sweeps = 10000;
};

struct LassoFit {
  double lambda = 0.0;
  double intercept = 0.0;
  Eigen::VectorXd coefficients;
  std::size_t n_iterations = 0;
  bool converged = false;

  std::size_t nonzero() const;
};

/// min 1/2 sum (y - b0 - X b)^2 + lambda sum |b_j| by cyclic coordinate
/// descent with soft thresholding on centred cross-products; the intercept
/// is unpenalized. A fit is
/// converged once a sweep moves no coefficient by `tolerance` or more and
/// the KKT conditions hold within `kkt_tolerance`.
LassoFit lasso_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                   const LassoOptions& options = {}, const Eigen::VectorXd* warm_start = nullptr);

/// Smallest lambda with an all-zero slope vector: max_j |x_j^T (y - mean y)|
/// over mean-centred columns.
double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// count log-spaced values from lambda_max down to ratio * lambda_max.
std::vector<double> lambda_grid(double lambda_max, std::size_t count = 100, double ratio = 1e-3);

/// Fits along a decreasing lambda sequence with warm starts.
std::vector<LassoFit> lasso_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                 const std::vector<double>& lambdas, const LassoOptions& options = {});

/// Largest KKT violation: |x_j^T r| - lambda for zero slopes, |x_j^T r - lambda sign(b_j)| otherwise.
double kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LassoFit& fit);

double lasso_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LassoFit& fit);

}  // namespace sdm::selection
