#include "sdm/selection/collinearity.hpp"

#include <cmath>
#include <limits>

#include "sdm/error.hpp"
#include "sdm/linear/local_solver.hpp"
#include "sdm/parallel.hpp"

namespace sdm::selection {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRankTol = 1e-10;

}  // namespace

double CollinearityReport::max_vif(std::size_t j) const {
  if (vif.rows() == 0) return 1.0;
  return vif.col(static_cast<Eigen::Index>(j)).maxCoeff();
}

LocalCollinearity collinearity_at(const Eigen::MatrixXd& X, const Eigen::VectorXd& weights,
                                  const CollinearityThresholds& thresholds) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  LocalCollinearity out;
  out.vif = Eigen::VectorXd::Ones(p);
  out.cn_flags.assign(static_cast<std::size_t>(p), false);

  const double wsum = weights.sum();
  const Eigen::VectorXd sw = weights.cwiseMax(0.0).cwiseSqrt();
  const Eigen::RowVectorXd mean = (weights.transpose() * X) / wsum;
  Eigen::MatrixXd Z = (X.rowwise() - mean).array().colwise() * sw.array();

  // VIF by auxiliary regressions on weighted, centred columns.
  for (Eigen::Index j = 0; j < p; ++j) {
    const Eigen::VectorXd target = Z.col(j);
    const double sst = target.squaredNorm();
    if (!(sst > 0.0)) {
      out.vif(j) = kInf;
      continue;
    }
    if (p == 1) continue;
    Eigen::MatrixXd others(n, p - 1);
    for (Eigen::Index k = 0, c = 0; k < p; ++k) {
      if (k != j) others.col(c++) = Z.col(k);
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(others);
    cod.setThreshold(kRankTol);
    const Eigen::VectorXd coef = cod.solve(target);
    const double sse = (target - others * coef).squaredNorm();
    const double r2 = 1.0 - sse / sst;
    out.vif(j) = (sse <= sst * 1e-12) ? kInf : 1.0 / (1.0 - r2);
    if (out.vif(j) < 1.0) out.vif(j) = 1.0;  // rounding below one
  }

  // Condition number of sqrt(W)[1, X] with unit-length columns.
  Eigen::MatrixXd D(n, p + 1);
  D.col(0) = sw;
  D.rightCols(p) = X.array().colwise() * sw.array();
  Eigen::VectorXd norms = D.colwise().norm().transpose();
  bool zero_column = false;
  for (Eigen::Index k = 0; k <= p; ++k) {
    if (norms(k) > 0.0) {
      D.col(k) /= norms(k);
    } else {
      zero_column = true;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(D, Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  const bool singular = zero_column || !(smin > smax * kRankTol) || n < p + 1;
  out.condition_number = singular ? kInf : smax / smin;

  // Variance-decomposition proportions for high condition indices.
  const Eigen::MatrixXd& V = svd.matrixV();
  for (Eigen::Index j = 1; j <= p; ++j) {
    double total = 0.0;
    Eigen::VectorXd phi(s.size());
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      phi(k) = s(k) > smax * kRankTol ? V(j, k) * V(j, k) / (s(k) * s(k)) : kInf;
      total += phi(k);
    }
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      const double index = s(k) > smax * kRankTol ? smax / s(k) : kInf;
      if (index <= thresholds.condition_number) continue;
      const double share = std::isinf(total) ? (std::isinf(phi(k)) && std::abs(V(j, k)) > 1e-8 ? 1.0 : 0.0)
                                             : phi(k) / total;
      if (share > thresholds.variance_proportion) out.cn_flags[static_cast<std::size_t>(j - 1)] = true;
    }
  }
  return out;
}

CollinearityReport local_collinearity(const data::FeatureTable& table, spatial::Kernel kernel,
                                      const spatial::Bandwidth& bandwidth,
                                      const CollinearityThresholds& thresholds) {
  table.validate();
  const std::size_t n = table.rows();
  const std::size_t p = table.features();
  require(p >= 2, ErrorCode::invalid_argument, "collinearity screening needs at least 2 features");
  require(table.standardization.has_value(), ErrorCode::invalid_argument,
          "collinearity screening expects a standardized table");

  const linear::LocalContext context(table.locations);
  CollinearityReport report;
  report.names = table.column_names();
  report.vif.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  report.condition_number.resize(static_cast<Eigen::Index>(n));
  std::vector<std::vector<bool>> cn_flags(n);

  parallel_for(n, [&](std::size_t i) {
    std::vector<linear::WeightEntry> entries;
    context.weights_at(i, kernel, context.bandwidth_at(i, bandwidth), entries);
    Eigen::MatrixXd Xi(static_cast<Eigen::Index>(entries.size()), static_cast<Eigen::Index>(p));
    Eigen::VectorXd wi(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t r = 0; r < entries.size(); ++r) {
      Xi.row(static_cast<Eigen::Index>(r)) = table.X.row(entries[r].id);
      wi(static_cast<Eigen::Index>(r)) = entries[r].w;
    }
    const LocalCollinearity local = collinearity_at(Xi, wi, thresholds);
    report.vif.row(static_cast<Eigen::Index>(i)) = local.vif.transpose();
    report.condition_number(static_cast<Eigen::Index>(i)) = local.condition_number;
    cn_flags[i] = local.cn_flags;
  });

  report.flagged_mask.assign(p, false);
  for (std::size_t j = 0; j < p; ++j) {
    bool flag = report.max_vif(j) > thresholds.vif;
    for (std::size_t i = 0; i < n && !flag; ++i) {
      flag = report.condition_number(static_cast<Eigen::Index>(i)) > thresholds.condition_number &&
             cn_flags[i][j];
    }
    report.flagged_mask[j] = flag;
    if (flag) report.flagged.push_back(report.names[j]);
  }
  return report;
}

}  // namespace sdm::selection
