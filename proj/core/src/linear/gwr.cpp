#include "sdm/linear/gwr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "sdm/error.hpp"
#include "sdm/parallel.hpp"

namespace sdm::linear {

using spatial::Bandwidth;
using spatial::Kernel;
using spatial::Point;

GwrFit gwr_fit(const data::FeatureTable& table, Kernel kernel, const Bandwidth& bandwidth) {
  table.validate();
  return gwr_fit(table.X, table.y, table.locations, table.column_names(), kernel, bandwidth);
}

GwrFit gwr_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               const std::vector<Point>& locations, const std::vector<std::string>& names,
               Kernel kernel, const Bandwidth& bandwidth,
               std::shared_ptr<const LocalContext> context) {
  const Eigen::Index n = X.rows();
  const Eigen::Index k = X.cols() + 1;
  require(y.size() == n && static_cast<Eigen::Index>(locations.size()) == n,
          ErrorCode::schema_mismatch, "GWR: X, y and locations disagree in length");
  require(n > k + 1, ErrorCode::invalid_argument, "GWR needs at least p + 2 observations");
  if (!context) context = std::make_shared<LocalContext>(locations);

  GwrFit fit;
  fit.kernel = kernel;
  fit.bandwidth = bandwidth;
  fit.names.push_back("intercept");
  for (const auto& nm : names) fit.names.push_back(nm);
  fit.X = X;
  fit.y = y;
  fit.locations = locations;
  fit.context = context;

  const Eigen::MatrixXd design = with_intercept(X);
  fit.resolved_bandwidth.resize(n);
  fit.beta.resize(n, k);
  fit.se.resize(n, k);
  fit.tvalues.resize(n, k);
  fit.hat_diag.resize(n);
  fit.fitted.resize(n);
  Eigen::MatrixXd cct_diag(n, k);

  std::vector<Eigen::Index> singular;
  std::mutex singular_mutex;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double b = context->bandwidth_at(i, bandwidth);
    fit.resolved_bandwidth(r) = b;
    std::vector<WeightEntry> w;
    context->weights_at(i, kernel, b, w);
    auto sol = solve_weighted(design, y, w);
    if (!sol) {
      std::lock_guard lock(singular_mutex);
      singular.push_back(r);
      return;
    }
    fit.beta.row(r) = sol->beta.transpose();
    const Eigen::RowVectorXd xi = design.row(r);
    fit.fitted(r) = xi.dot(sol->beta);
    // Self weight is kernel(0) = 1 for every family.
    fit.hat_diag(r) = xi * sol->xtwx_inv * xi.transpose();
    // diag of C C^T with C = A^-1 X^T W:  A^-1 (X^T W^2 X) A^-1
    Eigen::MatrixXd xtw2x = Eigen::MatrixXd::Zero(k, k);
    for (const auto& e : w) {
      const auto row = design.row(e.id);
      xtw2x.noalias() += (e.w * e.w) * (row.transpose() * row);
    }
    cct_diag.row(r) = (sol->xtwx_inv * xtw2x * sol->xtwx_inv).diagonal().transpose();
  });
  if (!singular.empty()) {
    std::sort(singular.begin(), singular.end());
    std::ostringstream msg;
    msg << "local design is rank deficient at location " << singular.front();
    if (singular.size() > 1) msg << " (and " << singular.size() - 1 << " more)";
    msg << "; try a larger bandwidth than " << spatial::to_string(bandwidth);
    fail(ErrorCode::rank_deficient, msg.str());
  }

  fit.residuals = y - fit.fitted;
  fit.rss = fit.residuals.squaredNorm();
  fit.trS = fit.hat_diag.sum();
  const double dof = static_cast<double>(n) - fit.trS;
  fit.sigma_hat = dof > 0 ? std::sqrt(fit.rss / dof) : std::numeric_limits<double>::quiet_NaN();
  fit.se = (cct_diag.array() * fit.sigma_hat * fit.sigma_hat).sqrt();
  fit.tvalues = fit.beta.array() / fit.se.array();
  fit.aicc = aicc_from_rss(fit.rss, static_cast<double>(n), fit.trS);
  return fit;
}

Eigen::RowVectorXd GwrFit::hat_row(std::size_t i) const {
  require(i < rows(), ErrorCode::invalid_argument, "hat_row index out of range");
  const Eigen::MatrixXd design = with_intercept(X);
  const double b = context->bandwidth_at(i, bandwidth);
  std::vector<WeightEntry> w;
  context->weights_at(i, kernel, b, w);
  auto sol = solve_weighted(design, y, w);
  require(sol.has_value(), ErrorCode::rank_deficient, "hat_row: singular local design");
  const Eigen::RowVectorXd proj = design.row(static_cast<Eigen::Index>(i)) * sol->xtwx_inv;
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(design.rows());
  for (const auto& e : w) row(e.id) = e.w * proj.dot(design.row(e.id));
  return row;
}

std::optional<Eigen::VectorXd> gwr_local_beta(const GwrFit& fit, const Point& at) {
  require(fit.context != nullptr, ErrorCode::unfitted_model, "GWR fit carries no training data");
  const Eigen::MatrixXd design = with_intercept(fit.X);
  const double b = fit.context->bandwidth_at(at, fit.bandwidth);
  std::vector<WeightEntry> w;
  fit.context->weights_at(at, fit.kernel, b, w);
  auto sol = solve_weighted(design, fit.y, w);
  if (!sol) return std::nullopt;
  return sol->beta;
}

GwrPrediction gwr_predict(const GwrFit& fit, const std::vector<Point>& locations,
                          const Eigen::MatrixXd& X) {
  require(fit.context != nullptr, ErrorCode::unfitted_model, "GWR fit carries no training data");
  require(X.cols() == fit.X.cols(), ErrorCode::schema_mismatch,
          "GWR prediction: column count does not match the training design");
  require(static_cast<Eigen::Index>(locations.size()) == X.rows(), ErrorCode::schema_mismatch,
          "GWR prediction: one location per row is required");
  const Eigen::Index m = X.rows();
  GwrPrediction out;
  out.values = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN());
  out.ok.assign(static_cast<std::size_t>(m), false);
  out.errors.assign(static_cast<std::size_t>(m), "");
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
    try {
      auto beta = gwr_local_beta(fit, locations[i]);
      if (!beta) {
        out.errors[i] = "rank_deficient: singular local design at query location";
        return;
      }
      const auto r = static_cast<Eigen::Index>(i);
      out.values(r) = (*beta)(0) + X.row(r).dot(beta->tail(beta->size() - 1));
      out.ok[i] = true;
    } catch (const Error& e) {
      out.errors[i] = std::string(to_string(e.code())) + ": " + e.what();
    }
  });
  return out;
}

}  // namespace sdm::linear
