#include "sdm/diagnostics/metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sdm/error.hpp"

namespace sdm::diag {

double aicc(double n, double sigma_hat, double trS) {
  const double denom = n - 2.0 - trS;
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return 2.0 * n * std::log(sigma_hat) + n * std::log(2.0 * std::numbers::pi) + n * (n + trS) / denom;
}

double rmse(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
  require(y.size() == yhat.size(), ErrorCode::schema_mismatch, "rmse: y and prediction lengths differ");
  require(y.size() >= 1, ErrorCode::invalid_argument, "rmse needs at least 1 observation");
  return std::sqrt((y - yhat).squaredNorm() / static_cast<double>(y.size()));
}

MetricsReport metrics(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat,
                      std::optional<double> trS, std::optional<double> sigma_hat) {
  require(y.size() == yhat.size(), ErrorCode::schema_mismatch, "metrics: y and prediction lengths differ");
  require(y.size() >= 2, ErrorCode::invalid_argument, "metrics need at least 2 observations");
  const double n = static_cast<double>(y.size());
  const double sse = (y - yhat).squaredNorm();
  const double sst = (y.array() - y.mean()).square().sum();
  require(sst > 0.0, ErrorCode::numerical, "R-squared is undefined for a constant target");

  MetricsReport r;
  r.n = static_cast<std::size_t>(y.size());
  r.rmse = rmse(y, yhat);
  r.r2 = 1.0 - sse / sst;
  r.p_effective = trS.value_or(1.0);
  r.adjusted_r2 = 1.0 - (n - 1.0) / (n - r.p_effective) * (1.0 - r.r2);
  if (trS && sigma_hat) r.aicc = aicc(n, *sigma_hat, *trS);
  return r;
}

}  // namespace sdm::diag
