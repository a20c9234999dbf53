#include "sdm/linear/significance.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <sstream>

#include "sdm/error.hpp"

namespace sdm::linear {

double t_critical(double alpha, double dof) {
  require(alpha > 0 && alpha < 1, ErrorCode::invalid_argument, "alpha must lie in (0, 1)");
  require(dof > 0, ErrorCode::numerical, "t test needs positive degrees of freedom");
  boost::math::students_t dist(dof);
  return boost::math::quantile(boost::math::complement(dist, alpha / 2.0));
}

namespace {

TermSignificance summarize(const std::string& name, const Eigen::VectorXd& beta,
                           const Eigen::VectorXd& t, double alpha, double dof) {
  TermSignificance s;
  s.name = name;
  const auto n = static_cast<double>(beta.size());
  s.mean = beta.mean();
  s.sd = std::sqrt((beta.array() - s.mean).square().sum() / n);
  s.min = beta.minCoeff();
  s.max = beta.maxCoeff();
  std::vector<double> sorted(beta.data(), beta.data() + beta.size());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  s.median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  s.t_mean = t.mean();
  s.t_sd = std::sqrt((t.array() - s.t_mean).square().sum() / n);
  s.adjusted_alpha = alpha;
  s.critical_t = t_critical(alpha, dof);
  std::size_t hits = 0;
  s.significant.resize(m);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const bool sig = std::abs(t(i)) > s.critical_t;
    s.significant[static_cast<std::size_t>(i)] = sig;
    hits += sig;
  }
  s.percent_significant = 100.0 * static_cast<double>(hits) / n;
  return s;
}

double checked_dof(double n, double trS) {
  if (!(trS < n - 2.0)) {
    std::ostringstream msg;
    msg << "degrees of freedom exhausted: trace(S)=" << trS << " >= n-2=" << n - 2.0;
    fail(ErrorCode::numerical, msg.str());
  }
  return n - trS;
}

}  // namespace

SignificanceReport significance(const GwrFit& fit, double raw_alpha) {
  SignificanceReport out;
  out.raw_alpha = raw_alpha;
  const auto n = static_cast<double>(fit.rows());
  out.dof = checked_dof(n, fit.trS);
  const auto k = static_cast<double>(fit.beta.cols());
  const double adjusted = raw_alpha * k / fit.trS;
  for (Eigen::Index j = 0; j < fit.beta.cols(); ++j) {
    auto s = summarize(fit.names[static_cast<std::size_t>(j)], fit.beta.col(j), fit.tvalues.col(j),
                       adjusted, out.dof);
    s.enp = fit.trS;
    out.terms.push_back(std::move(s));
  }
  return out;
}

SignificanceReport significance(const MgwrFit& fit, double raw_alpha) {
  SignificanceReport out;
  out.raw_alpha = raw_alpha;
  const auto n = static_cast<double>(fit.beta.rows());
  out.dof = checked_dof(n, fit.trS);
  for (Eigen::Index j = 0; j < fit.beta.cols(); ++j) {
    const double enp = fit.enp(j);
    const double adjusted = std::min(raw_alpha, raw_alpha / std::max(enp, 1e-12));
    auto s = summarize(fit.names[static_cast<std::size_t>(j)], fit.beta.col(j), fit.tvalues.col(j),
                       adjusted, out.dof);
    s.enp = enp;
    out.terms.push_back(std::move(s));
  }
  return out;
}

double loocv_r2(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted,
                const Eigen::VectorXd& hat_diag) {
  const Eigen::Index n = y.size();
  require(fitted.size() == n && hat_diag.size() == n, ErrorCode::schema_mismatch,
          "LOOCV: length mismatch");
  double mse = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(hat_diag(i) < 1.0 - 1e-10)) {
      std::ostringstream msg;
      msg << "LOOCV undefined: hat diagonal at row " << i << " is " << hat_diag(i);
      fail(ErrorCode::numerical, msg.str());
    }
    const double e = (y(i) - fitted(i)) / (1.0 - hat_diag(i));
    mse += e * e;
  }
  mse /= static_cast<double>(n);
  const double var = (y.array() - y.mean()).square().mean();
  require(var > 0, ErrorCode::numerical, "LOOCV R2 undefined for a constant target");
  return 1.0 - mse / var;
}

double loocv_r2(const OlsFit& fit) { return loocv_r2(fit.y, fit.fitted, fit.hat_diag); }
double loocv_r2(const GwrFit& fit) { return loocv_r2(fit.y, fit.fitted, fit.hat_diag); }
double loocv_r2(const MgwrFit& fit) { return loocv_r2(fit.y, fit.fitted, fit.hat_diag); }

}  // namespace sdm::linear
