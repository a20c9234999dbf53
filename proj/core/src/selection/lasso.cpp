#include "sdm/selection/lasso.hpp"

#include <cmath>

#include "sdm/error.hpp"

namespace sdm::selection {

std::size_t LassoFit::nonzero() const {
  std::size_t c = 0;
  for (Eigen::Index j = 0; j < coefficients.size(); ++j) c += coefficients(j) != 0.0;
  return c;
}

namespace {

double violation(const Eigen::VectorXd& grad, const Eigen::VectorXd& beta, double lambda) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    const double v = beta(j) == 0.0 ? std::abs(grad(j)) - lambda
                                    : std::abs(grad(j) - lambda * (beta(j) > 0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  return worst;
}

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

}  // namespace

double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::RowVectorXd mean = X.colwise().mean();
  const Eigen::MatrixXd Xc = X.rowwise() - mean;
  const Eigen::VectorXd yc = y.array() - y.mean();
  return (Xc.transpose() * yc).cwiseAbs().maxCoeff();
}

std::vector<double> lambda_grid(double lmax, std::size_t count, double ratio) {
  require(count >= 2 && ratio > 0 && ratio < 1 && lmax > 0, ErrorCode::invalid_argument,
          "lambda grid needs count >= 2, 0 < ratio < 1 and lambda_max > 0");
  std::vector<double> out(count);
  const double log_hi = std::log(lmax);
  const double log_lo = std::log(lmax * ratio);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = std::exp(log_hi + (log_lo - log_hi) * static_cast<double>(k) /
                                   static_cast<double>(count - 1));
  }
  out.front() = lmax;
  return out;
}

namespace {

// Centred cross-products; sweeps then cost O(p^2) regardless of n.
struct Gram {
  Eigen::RowVectorXd x_mean;
  double y_mean = 0.0;
  Eigen::MatrixXd G;
  Eigen::VectorXd c;
};

Gram make_gram(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  require(X.rows() == y.size(), ErrorCode::schema_mismatch, "lasso: X and y lengths differ");
  require(X.allFinite() && y.allFinite(), ErrorCode::invalid_argument, "lasso: non-finite input");
  Gram g;
  g.x_mean = X.colwise().mean();
  g.y_mean = y.mean();
  const Eigen::MatrixXd Xc = X.rowwise() - g.x_mean;
  const Eigen::VectorXd yc = y.array() - g.y_mean;
  g.G = Xc.transpose() * Xc;
  g.c = Xc.transpose() * yc;
  return g;
}

LassoFit fit_gram(const Gram& g, double lambda, const LassoOptions& options,
                  const Eigen::VectorXd* warm_start) {
  require(lambda >= 0 && std::isfinite(lambda), ErrorCode::invalid_argument,
          "lasso: lambda must be finite and non-negative");
  const Eigen::Index p = g.G.cols();
  LassoFit fit;
  fit.lambda = lambda;
  fit.coefficients = warm_start ? *warm_start : Eigen::VectorXd::Zero(p);
  require(fit.coefficients.size() == p, ErrorCode::invalid_argument, "lasso: warm start size");
  // grad = Xc^T r, kept current across coordinate updates.
  Eigen::VectorXd grad = g.c - g.G * fit.coefficients;

  for (std::size_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double col_sq = g.G(j, j);
      if (col_sq == 0.0) {
        fit.coefficients(j) = 0.0;
        continue;
      }
      const double old = fit.coefficients(j);
      const double updated = soft_threshold(grad(j) + col_sq * old, lambda) / col_sq;
      const double delta = updated - old;
      if (delta != 0.0) {
        grad.noalias() -= delta * g.G.col(j);
        fit.coefficients(j) = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    fit.n_iterations = sweep;
    // A sweep that changes nothing cannot improve the KKT residual either.
    if (max_change == 0.0) {
      fit.converged = true;
      break;
    }
    if (max_change < options.tolerance) {
      grad = g.c - g.G * fit.coefficients;  // drop accumulated drift
      if (violation(grad, fit.coefficients, lambda) <= options.kkt_tolerance) {
        fit.converged = true;
        break;
      }
    }
  }
  fit.intercept = g.y_mean - g.x_mean.dot(fit.coefficients);
  return fit;
}

}  // namespace

LassoFit lasso_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                   const LassoOptions& options, const Eigen::VectorXd* warm_start) {
  require(lambda >= 0, ErrorCode::invalid_argument, "lasso: lambda must be non-negative");
  return fit_gram(make_gram(X, y), lambda, options, warm_start);
}

std::vector<LassoFit> lasso_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                 const std::vector<double>& lambdas, const LassoOptions& options) {
  const Gram g = make_gram(X, y);
  std::vector<LassoFit> out;
  out.reserve(lambdas.size());
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(X.cols());
  for (double lambda : lambdas) {
    out.push_back(fit_gram(g, lambda, options, &warm));
    warm = out.back().coefficients;
  }
  return out;
}

double kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LassoFit& fit) {
  const Eigen::VectorXd r =
      y - X * fit.coefficients - Eigen::VectorXd::Constant(y.size(), fit.intercept);
  return violation(X.transpose() * r, fit.coefficients, fit.lambda);
}

double lasso_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LassoFit& fit) {
  const Eigen::VectorXd r = y - X * fit.coefficients - Eigen::VectorXd::Constant(y.size(), fit.intercept);
  return 0.5 * r.squaredNorm() + fit.lambda * fit.coefficients.lpNorm<1>();
}

}  // namespace sdm::selection
