#include "sdm/linear/ols.hpp"

#include <cmath>
#include <sstream>

#include "sdm/error.hpp"
#include "sdm/linear/local_solver.hpp"

namespace sdm::linear {

OlsFit ols_fit(const data::FeatureTable& table) {
  table.validate();
  return ols_fit(table.X, table.y, table.column_names());
}

OlsFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               const std::vector<std::string>& names) {
  const Eigen::Index n = X.rows();
  const Eigen::Index k = X.cols() + 1;
  require(y.size() == n, ErrorCode::schema_mismatch, "OLS: X and y row counts differ");
  require(n > k, ErrorCode::invalid_argument, "OLS needs more rows than parameters");

  const Eigen::MatrixXd design = with_intercept(X);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) {
    // Null-space columns of the design identify a dependent set.
    Eigen::FullPivLU<Eigen::MatrixXd> lu(design);
    lu.setThreshold(1e-10);
    const Eigen::MatrixXd kernel = lu.kernel();
    std::ostringstream msg;
    msg << "design is rank deficient; dependent columns:";
    for (Eigen::Index j = 0; j < k; ++j) {
      if (kernel.rows() == k && kernel.row(j).cwiseAbs().maxCoeff() > 1e-8) {
        msg << ' ' << (j == 0 ? std::string("intercept") : names.at(static_cast<std::size_t>(j - 1)));
      }
    }
    fail(ErrorCode::rank_deficient, msg.str());
  }

  OlsFit fit;
  fit.names.push_back("intercept");
  for (const auto& nm : names) fit.names.push_back(nm);
  fit.y = y;
  fit.beta = qr.solve(y);
  fit.fitted = design * fit.beta;
  fit.residuals = y - fit.fitted;
  fit.rss = fit.residuals.squaredNorm();

  // (X^T X)^-1 through R of the pivoted QR.
  const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd Rinv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd inv_pivoted = Rinv * Rinv.transpose();
  const auto& perm = qr.colsPermutation();
  const Eigen::MatrixXd xtx_inv = perm * inv_pivoted * perm.transpose();

  fit.hat_diag.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    fit.hat_diag(i) = design.row(i) * xtx_inv * design.row(i).transpose();
  }
  fit.trS = static_cast<double>(k);
  const double dof = static_cast<double>(n - k);
  fit.sigma_hat = std::sqrt(fit.rss / dof);
  fit.se = (xtx_inv.diagonal().array() * fit.sigma_hat * fit.sigma_hat).sqrt();
  fit.tvalues = fit.beta.array() / fit.se.array();
  fit.aicc = aicc_from_rss(fit.rss, static_cast<double>(n), fit.trS);
  return fit;
}

Eigen::VectorXd OlsFit::predict(const Eigen::MatrixXd& X) const {
  require(X.cols() + 1 == beta.size(), ErrorCode::schema_mismatch,
          "OLS prediction: column count does not match the fit");
  return with_intercept(X) * beta;
}

}  // namespace sdm::linear
