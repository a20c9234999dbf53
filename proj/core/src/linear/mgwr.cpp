#include "sdm/linear/mgwr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "sdm/error.hpp"
#include "sdm/linear/gwr.hpp"
#include "sdm/parallel.hpp"

namespace sdm::linear {

using spatial::Bandwidth;
using spatial::Kernel;

namespace {

constexpr std::size_t kMaxHatRows = 5000;

// Univariate GWR of `target` on a single column (no intercept) at adaptive k.
struct UnivariateSmoother {
  const LocalContext& ctx;
  Kernel kernel;

  // Fills beta/fit; returns false on a zero local denominator.
  bool fit(const Eigen::VectorXd& x, const Eigen::VectorXd& target, std::size_t k,
           Eigen::VectorXd& beta, Eigen::VectorXd* hat_diag, bool drop_self) const {
    const std::size_t n = ctx.size();
    beta.resize(static_cast<Eigen::Index>(n));
    if (hat_diag) hat_diag->resize(static_cast<Eigen::Index>(n));
    bool ok = true;
    std::mutex m;
    parallel_for(n, [&](std::size_t i) {
      std::vector<WeightEntry> w;
      const double b = ctx.bandwidth_at(i, Bandwidth::adaptive(k));
      ctx.weights_at(i, kernel, b, w);
      double num = 0.0, den = 0.0, self = 0.0;
      for (const auto& e : w) {
        if (e.id == i) {
          self = e.w;
          if (drop_self) continue;
        }
        num += e.w * x(e.id) * target(e.id);
        den += e.w * x(e.id) * x(e.id);
      }
      if (!(den > 1e-300)) {
        std::lock_guard lock(m);
        ok = false;
        return;
      }
      const auto r = static_cast<Eigen::Index>(i);
      beta(r) = num / den;
      if (hat_diag) (*hat_diag)(r) = self * x(r) * x(r) / den;
    });
    return ok;
  }

  double criterion(const Eigen::VectorXd& x, const Eigen::VectorXd& target, std::size_t k,
                   Criterion c) const {
    Eigen::VectorXd beta, hat;
    const bool cv = c == Criterion::cv;
    if (!fit(x, target, k, beta, cv ? nullptr : &hat, cv)) {
      return std::numeric_limits<double>::infinity();
    }
    const double rss = (target - x.cwiseProduct(beta)).squaredNorm();
    const auto n = static_cast<double>(ctx.size());
    if (cv) return rss / n;
    return aicc_from_rss(rss, n, hat.sum());
  }

  // Dense smoother matrix A with A * target = x .* beta.
  Eigen::MatrixXd operator_matrix(const Eigen::VectorXd& x, std::size_t k) const {
    const std::size_t n = ctx.size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    parallel_for(n, [&](std::size_t i) {
      std::vector<WeightEntry> w;
      const double b = ctx.bandwidth_at(i, Bandwidth::adaptive(k));
      ctx.weights_at(i, kernel, b, w);
      double den = 0.0;
      for (const auto& e : w) den += e.w * x(e.id) * x(e.id);
      const auto r = static_cast<Eigen::Index>(i);
      for (const auto& e : w) A(r, e.id) = x(r) * e.w * x(e.id) / den;
    });
    return A;
  }
};

void require_standardized(const data::FeatureTable& t) {
  auto check = [](const Eigen::Ref<const Eigen::VectorXd>& v) {
    const double mean = v.mean();
    const double sd = std::sqrt((v.array() - mean).square().mean());
    return std::abs(mean) < 1e-6 && std::abs(sd - 1.0) < 1e-6;
  };
  for (Eigen::Index j = 0; j < t.X.cols(); ++j) {
    if (!check(t.X.col(j))) {
      fail(ErrorCode::invalid_argument, "MGWR requires standardized inputs; column '" +
                                            t.columns[static_cast<std::size_t>(j)].name +
                                            "' is not z-scored");
    }
  }
  if (!check(t.y)) fail(ErrorCode::invalid_argument, "MGWR requires a standardized target");
}

}  // namespace

MgwrFit mgwr_fit(const data::FeatureTable& table, const MgwrOptions& options) {
  table.validate();
  require_standardized(table);
  const std::size_t n = table.rows();
  const std::size_t p = table.features();
  const std::size_t terms = p + 1;
  if (n > kMaxHatRows) {
    std::ostringstream msg;
    msg << "MGWR hat matrices are limited to n <= " << kMaxHatRows << " (n=" << n << ")";
    fail(ErrorCode::unsupported, msg.str());
  }

  auto ctx = std::make_shared<const LocalContext>(table.locations);
  const Eigen::MatrixXd design = with_intercept(table.X);
  const Eigen::VectorXd& y = table.y;
  const auto N = static_cast<Eigen::Index>(n);

  MgwrFit out;
  out.kernel = options.kernel;
  out.criterion = options.criterion;
  out.names.push_back("intercept");
  for (const auto& c : table.columns) out.names.push_back(c.name);
  out.y = y;

  // Start from a single-bandwidth GWR.
  const auto start = select_bandwidth(table.X, y, ctx, options.kernel, Bandwidth::Mode::adaptive,
                                      options.criterion);
  out.initial_bandwidth = start.bandwidth.k;
  const GwrFit gwr = gwr_fit(table.X, y, table.locations, table.column_names(), options.kernel,
                             start.bandwidth, ctx);

  Eigen::MatrixXd beta = gwr.beta;
  Eigen::MatrixXd f(N, static_cast<Eigen::Index>(terms));
  for (std::size_t j = 0; j < terms; ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    f.col(c) = design.col(c).cwiseProduct(beta.col(c));
  }

  // Per-term hat matrices R_j from the starting GWR: R_j[i,:] = x_ij * (A_i^-1 X^T W_i)[j,:].
  std::vector<Eigen::MatrixXd> R(terms, Eigen::MatrixXd::Zero(N, N));
  parallel_for(n, [&](std::size_t i) {
    std::vector<WeightEntry> w;
    const double b = ctx->bandwidth_at(i, start.bandwidth);
    ctx->weights_at(i, options.kernel, b, w);
    auto sol = solve_weighted(design, y, w);
    const auto r = static_cast<Eigen::Index>(i);
    for (const auto& e : w) {
      const Eigen::VectorXd c = sol->xtwx_inv * design.row(e.id).transpose() * e.w;
      for (std::size_t j = 0; j < terms; ++j) {
        R[j](r, e.id) = design(r, static_cast<Eigen::Index>(j)) * c(static_cast<Eigen::Index>(j));
      }
    }
  });
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, N);
  for (const auto& Rj : R) S += Rj;

  std::vector<std::size_t> bw(terms, start.bandwidth.k);
  Eigen::VectorXd err = y - f.rowwise().sum();
  double rss_prev = err.squaredNorm();
  const UnivariateSmoother smoother{*ctx, options.kernel};
  const auto [lo, hi] = bandwidth_bounds(*ctx, p, Bandwidth::Mode::adaptive);

  for (std::size_t iter = 1; iter <= options.max_iterations; ++iter) {
    const bool search = iter <= options.search_every_until ||
                        (options.search_period > 0 && iter % options.search_period == 0);
    for (std::size_t j = 0; j < terms; ++j) {
      const auto c = static_cast<Eigen::Index>(j);
      const Eigen::VectorXd x = design.col(c);
      const Eigen::VectorXd partial = err + f.col(c);
      if (search) {
        auto score = [&](double k) {
          return smoother.criterion(x, partial, static_cast<std::size_t>(k), options.criterion);
        };
        bw[j] = golden_section(score, lo, hi, true, 1.0).bandwidth.k;
      }
      Eigen::VectorXd bj;
      if (!smoother.fit(x, partial, bw[j], bj, nullptr, false)) {
        fail(ErrorCode::rank_deficient, "MGWR: zero local design for term '" + out.names[j] + "'");
      }
      beta.col(c) = bj;
      const Eigen::VectorXd fj = x.cwiseProduct(bj);
      err = partial - fj;
      f.col(c) = fj;

      const Eigen::MatrixXd A = smoother.operator_matrix(x, bw[j]);
      Eigen::MatrixXd M = R[j] - S;
      M.diagonal().array() += 1.0;
      Eigen::MatrixXd Rj_new = A * M;
      S += Rj_new - R[j];
      R[j] = std::move(Rj_new);
    }
    const double rss = err.squaredNorm();
    const double soc = rss > 0 ? std::abs(rss - rss_prev) / rss : 0.0;
    out.trace.push_back({iter, rss, soc, bw});
    rss_prev = rss;
    if (soc < options.tolerance) {
      out.converged = true;
      break;
    }
  }

  out.bandwidths = bw;
  out.beta = beta;
  out.partial_fits = f;
  out.fitted = f.rowwise().sum();
  out.residuals = y - out.fitted;
  out.rss = out.residuals.squaredNorm();
  out.enp.resize(static_cast<Eigen::Index>(terms));
  for (std::size_t j = 0; j < terms; ++j) out.enp(static_cast<Eigen::Index>(j)) = R[j].trace();
  out.trS = out.enp.sum();
  out.hat_diag = S.diagonal();
  const double dof = static_cast<double>(n) - out.trS;
  out.sigma_hat = dof > 0 ? std::sqrt(out.rss / dof) : std::numeric_limits<double>::quiet_NaN();
  out.aicc = aicc_from_rss(out.rss, static_cast<double>(n), out.trS);

  out.se.resize(N, static_cast<Eigen::Index>(terms));
  for (std::size_t j = 0; j < terms; ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    for (Eigen::Index i = 0; i < N; ++i) {
      const double xij = design(i, c);
      out.se(i, c) = std::abs(xij) > 1e-12
                         ? out.sigma_hat * R[j].row(i).norm() / std::abs(xij)
                         : std::numeric_limits<double>::quiet_NaN();
    }
  }
  out.tvalues = out.beta.array() / out.se.array();
  for (Eigen::Index i = 0; i < out.tvalues.size(); ++i) {
    if (!std::isfinite(out.tvalues(i))) out.tvalues(i) = 0.0;
  }

  out.median_bandwidth_km.resize(terms);
  for (std::size_t j = 0; j < terms; ++j) {
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = ctx->bandwidth_at(i, Bandwidth::adaptive(bw[j]));
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(n / 2), d.end());
    double med = d[n / 2];
    if (n % 2 == 0) {
      med = 0.5 * (med + *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(n / 2)));
    }
    out.median_bandwidth_km[j] = med / 1000.0;
  }
  return out;
}

}  // namespace sdm::linear
