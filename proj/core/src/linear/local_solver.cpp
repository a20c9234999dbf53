#include "sdm/linear/local_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sdm/error.hpp"

namespace sdm::linear {

using spatial::Bandwidth;
using spatial::Kernel;
using spatial::Point;

namespace {
constexpr std::size_t kCacheLimit = 2500;
}

LocalContext::LocalContext(std::vector<Point> locations) : index_(std::move(locations)) {
  const std::size_t n = index_.size();
  if (n == 0 || n > kCacheLimit) return;
  sorted_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    Sorted* r = sorted_.data() + i * n;
    for (std::size_t k = 0; k < n; ++k) {
      r[k] = {static_cast<std::uint32_t>(k), spatial::distance(index_.point(i), index_.point(k))};
    }
    std::sort(r, r + n, [](const Sorted& a, const Sorted& b) {
      return a.d < b.d || (a.d == b.d && a.id < b.id);
    });
  }
}

double LocalContext::bandwidth_at(std::size_t i, const Bandwidth& bw) const {
  if (!cached() || bw.is_fixed()) return spatial::resolve_bandwidth(index_, location(i), bw);
  const std::size_t n = size();
  if (bw.k > n) return spatial::resolve_bandwidth(index_, location(i), bw);  // throws
  const Sorted* r = row(i);
  const std::size_t skip = r[0].d == 0.0 ? 1 : 0;
  const std::size_t available = n - skip;
  if (available == 0) fail(ErrorCode::invalid_bandwidth, "adaptive bandwidth has no neighbours");
  const double d = r[skip + std::min(bw.k, available) - 1].d;
  require(d > 0.0, ErrorCode::invalid_bandwidth,
          "adaptive bandwidth resolved to zero distance (coincident points)");
  return d;
}

double LocalContext::bandwidth_at(const Point& at, const Bandwidth& bw) const {
  return spatial::resolve_bandwidth(index_, at, bw);
}

void LocalContext::weights_at(std::size_t i, Kernel kernel, double bandwidth,
                              std::vector<WeightEntry>& out) const {
  if (!cached()) {
    weights_at(location(i), kernel, bandwidth, out);
    return;
  }
  out.clear();
  const Sorted* r = row(i);
  const std::size_t n = size();
  const bool compact = spatial::has_compact_support(kernel);
  for (std::size_t k = 0; k < n; ++k) {
    if (compact && r[k].d >= bandwidth) break;
    const double w = spatial::kernel_weight(kernel, r[k].d, bandwidth);
    if (w > 0.0) out.push_back({r[k].id, w});
  }
}

void LocalContext::weights_at(const Point& at, Kernel kernel, double bandwidth,
                              std::vector<WeightEntry>& out) const {
  out.clear();
  if (spatial::has_compact_support(kernel)) {
    for (const auto& nb : index_.within(at, bandwidth)) {
      const double w = spatial::kernel_weight(kernel, nb.distance, bandwidth);
      if (w > 0.0) out.push_back({static_cast<std::uint32_t>(nb.id), w});
    }
    return;
  }
  // Same visiting order as the cached rows so in-sample and query paths agree.
  const auto all = index_.knn(at, size());
  for (const auto& nb : all) {
    const double w = spatial::kernel_weight(kernel, nb.distance, bandwidth);
    if (w > 0.0) out.push_back({static_cast<std::uint32_t>(nb.id), w});
  }
}

double LocalContext::diameter() const {
  const auto hull = spatial::convex_hull(index_.points());
  double best = 0.0;
  for (std::size_t a = 0; a < hull.size(); ++a) {
    for (std::size_t b = a + 1; b < hull.size(); ++b) {
      best = std::max(best, spatial::distance(hull[a], hull[b]));
    }
  }
  if (hull.size() < 3) {
    for (std::size_t a = 0; a < size(); ++a) {
      for (std::size_t b = a + 1; b < size(); ++b) {
        best = std::max(best, spatial::distance(location(a), location(b)));
      }
    }
  }
  return best;
}

std::optional<LocalSolution> solve_weighted(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                                            const std::vector<WeightEntry>& weights) {
  const Eigen::Index p = design.cols();
  Eigen::MatrixXd xtwx = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd xtwy = Eigen::VectorXd::Zero(p);
  for (const auto& e : weights) {
    const auto row = design.row(e.id);
    xtwx.noalias() += e.w * (row.transpose() * row);
    xtwy.noalias() += (e.w * y(e.id)) * row.transpose();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xtwx);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) return std::nullopt;
  LocalSolution sol;
  sol.xtwx_inv = qr.inverse();
  sol.beta = sol.xtwx_inv * xtwy;
  return sol;
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd d(X.rows(), X.cols() + 1);
  d.col(0).setOnes();
  d.rightCols(X.cols()) = X;
  return d;
}

double aicc_from_rss(double rss, double n, double trS) {
  const double denom = n - 2.0 - trS;
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  const double sigma = std::sqrt(rss / n);
  return 2.0 * n * std::log(sigma) + n * std::log(2.0 * std::numbers::pi) + n * (n + trS) / denom;
}

}  // namespace sdm::linear
