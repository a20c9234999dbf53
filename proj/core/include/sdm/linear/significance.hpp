#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sdm/linear/gwr.hpp"
#include "sdm/linear/mgwr.hpp"
#include "sdm/linear/ols.hpp"

namespace sdm::linear {

struct TermSignificance {
  std::string name;
  double mean = 0, sd = 0, min = 0, median = 0, max = 0;  // local coefficients
  double t_mean = 0, t_sd = 0;
  double enp = 0;             // effective parameters used for the correction
  double adjusted_alpha = 0;
  double critical_t = 0;      // two-sided, n - trS degrees of freedom
  double percent_significant = 0;
  std::vector<bool> significant;  // per location
};

struct SignificanceReport {
  double raw_alpha = 0.05;
  double dof = 0;
  std::vector<TermSignificance> terms;
};

/// GWR: alpha* = alpha (p+1) / trS for every term.
SignificanceReport significance(const GwrFit& fit, double raw_alpha = 0.05);
/// MGWR: alpha_j = alpha / enp_j, capped at alpha (one parameter per term).
SignificanceReport significance(const MgwrFit& fit, double raw_alpha = 0.05);

/// Two-sided Student-t critical value.
double t_critical(double alpha, double dof);

/// 1 - MSE_loo / Var(y) via the hat-diagonal shortcut. Throws naming the
/// first row with H_ii >= 1 - 1e-10.
double loocv_r2(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted,
                const Eigen::VectorXd& hat_diag);
double loocv_r2(const OlsFit& fit);
double loocv_r2(const GwrFit& fit);
double loocv_r2(const MgwrFit& fit);

}  // namespace sdm::linear
