#include "sdm/linear/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "sdm/error.hpp"
#include "sdm/parallel.hpp"

namespace sdm::linear {

using spatial::Bandwidth;
using spatial::Kernel;

std::string_view to_string(Criterion c) { return c == Criterion::aicc ? "aicc" : "cv"; }

Criterion parse_criterion(std::string_view text) {
  if (text == "aicc" || text == "AICc") return Criterion::aicc;
  if (text == "cv" || text == "CV") return Criterion::cv;
  fail(ErrorCode::invalid_argument, "unknown bandwidth criterion '" + std::string(text) + "'");
}

BandwidthSelection golden_section(const std::function<double(double)>& score, double lower,
                                  double upper, bool integer, double tolerance,
                                  std::size_t max_iterations) {
  require(upper >= lower, ErrorCode::invalid_argument, "golden section: empty interval");
  constexpr double kDelta = 0.38196601125010515;  // (3 - sqrt 5) / 2
  BandwidthSelection out;
  out.lower = lower;
  out.upper = upper;

  std::map<double, double> cache;
  auto eval = [&](double x) {
    if (integer) x = std::round(x);
    auto it = cache.find(x);
    if (it != cache.end()) return it->second;
    double s = score(x);
    if (!std::isfinite(s)) s = std::numeric_limits<double>::infinity();
    cache.emplace(x, s);
    out.trace.push_back({x, s});
    return s;
  };

  double a = lower;
  double c = upper;
  double b = a + kDelta * (c - a);
  double d = c - kDelta * (c - a);
  double fb = eval(b);
  double fd = eval(d);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    const double width = c - a;
    if (integer ? width < 1.0 : width < tolerance) break;
    if (integer && std::round(b) == std::round(d) && width < 3.0) break;
    // Narrow windows are the ones that go singular, so an all-infinite pair moves right.
    const bool both_infinite = std::isinf(fb) && std::isinf(fd);
    if (fb <= fd && !both_infinite) {
      c = d;
      d = b;
      fd = fb;
      b = a + kDelta * (c - a);
      fb = eval(b);
    } else {
      a = b;
      b = d;
      fb = fd;
      d = c - kDelta * (c - a);
      fd = eval(d);
    }
  }
  if (integer) {
    // Settle the last unit-wide bracket exactly.
    for (double x = std::ceil(a); x <= std::floor(c); x += 1.0) eval(x);
  }

  auto best = std::min_element(out.trace.begin(), out.trace.end(),
                               [](const CriterionPoint& l, const CriterionPoint& r) {
                                 return l.score < r.score ||
                                        (l.score == r.score && l.bandwidth < r.bandwidth);
                               });
  if (best == out.trace.end() || !std::isfinite(best->score)) {
    fail(ErrorCode::numerical, "bandwidth criterion is non-finite across the whole search interval");
  }
  out.score = best->score;
  out.bandwidth = integer ? Bandwidth::adaptive(static_cast<std::size_t>(best->bandwidth))
                          : Bandwidth::fixed(best->bandwidth);
  return out;
}

double gwr_criterion(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                     const LocalContext& context, Kernel kernel, const Bandwidth& bandwidth,
                     Criterion criterion) {
  const std::size_t n = context.size();
  std::vector<double> sq_err(n, 0.0);
  std::vector<double> hat(n, 0.0);
  bool singular = false;
  std::mutex flag_mutex;
  parallel_for(n, [&](std::size_t i) {
    std::vector<WeightEntry> w;
    double b = 0.0;
    try {
      b = context.bandwidth_at(i, bandwidth);
    } catch (const Error&) {
      std::lock_guard lock(flag_mutex);
      singular = true;
      return;
    }
    context.weights_at(i, kernel, b, w);
    if (criterion == Criterion::cv) {
      std::erase_if(w, [i](const WeightEntry& e) { return e.id == i; });
    }
    auto sol = solve_weighted(design, y, w);
    if (!sol) {
      std::lock_guard lock(flag_mutex);
      singular = true;
      return;
    }
    const auto r = static_cast<Eigen::Index>(i);
    const Eigen::RowVectorXd xi = design.row(r);
    const double e = y(r) - xi.dot(sol->beta);
    sq_err[i] = e * e;
    if (criterion == Criterion::aicc) hat[i] = xi * sol->xtwx_inv * xi.transpose();
  });
  if (singular) return std::numeric_limits<double>::infinity();
  double rss = 0.0;
  double trS = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rss += sq_err[i];
    trS += hat[i];
  }
  if (criterion == Criterion::cv) return rss / static_cast<double>(n);
  return aicc_from_rss(rss, static_cast<double>(n), trS);
}

std::pair<double, double> bandwidth_bounds(const LocalContext& context, std::size_t p,
                                           Bandwidth::Mode mode) {
  const std::size_t n = context.size();
  require(n >= p + 3, ErrorCode::invalid_argument, "bandwidth search needs n >= p + 3");
  if (mode == Bandwidth::Mode::adaptive) {
    return {static_cast<double>(p + 2), static_cast<double>(n)};
  }
  double lo = 0.0;
  const Bandwidth k = Bandwidth::adaptive(p + 2);
  for (std::size_t i = 0; i < n; ++i) lo = std::max(lo, context.bandwidth_at(i, k));
  const double hi = context.diameter();
  return {lo, std::max(lo, hi)};
}

BandwidthSelection select_bandwidth(const data::FeatureTable& table, Kernel kernel,
                                    Bandwidth::Mode mode, Criterion criterion) {
  table.validate();
  auto ctx = std::make_shared<const LocalContext>(table.locations);
  return select_bandwidth(table.X, table.y, ctx, kernel, mode, criterion);
}

BandwidthSelection select_bandwidth(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    const std::shared_ptr<const LocalContext>& context,
                                    Kernel kernel, Bandwidth::Mode mode, Criterion criterion) {
  const auto p = static_cast<std::size_t>(X.cols());
  const auto [lo, hi] = bandwidth_bounds(*context, p, mode);
  const Eigen::MatrixXd design = with_intercept(X);
  const bool adaptive = mode == Bandwidth::Mode::adaptive;
  auto score = [&](double v) {
    const Bandwidth bw = adaptive ? Bandwidth::adaptive(static_cast<std::size_t>(v))
                                  : Bandwidth::fixed(v);
    return gwr_criterion(design, y, *context, kernel, bw, criterion);
  };
  return golden_section(score, lo, hi, adaptive, 1e-3 * (hi - lo));
}

}  // namespace sdm::linear
