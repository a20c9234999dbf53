#pragma once

#include <Eigen/Dense>
#include <optional>

namespace sdm::diag {

struct MetricsReport {
  double rmse = 0.0;
  double r2 = 0.0;           // 1 - SSE/SST
  double adjusted_r2 = 0.0;  // 1 - (n-1)/(n-p) (1-R^2), p = p_effective
  std::optional<double> aicc;
  std::size_t n = 0;
  double p_effective = 1.0;
};

/// Defined for any target, constant or not.
double rmse(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat);

/// p_effective is trS when given, else 1. AICc is reported only when both
/// trS and sigma_hat are supplied. Throws numerical for constant y.
MetricsReport metrics(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat,
                      std::optional<double> trS = std::nullopt,
                      std::optional<double> sigma_hat = std::nullopt);

/// 2n ln(sigma) + n ln(2 pi) + n (n + trS) / (n - 2 - trS); +inf when the
/// last denominator is not positive.
double aicc(double n, double sigma_hat, double trS);

}  // namespace sdm::diag
