#include "sdm/diagnostics/moran.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sdm/error.hpp"
#include "sdm/parallel.hpp"

namespace sdm::diag {

namespace {

double cross_product(const Eigen::VectorXd& z, const spatial::SpatialWeights& w,
                     const std::vector<std::size_t>* perm) {
  double total = 0.0;
  for (std::size_t i = 0; i < w.rows.size(); ++i) {
    const double zi = perm ? z((*perm)[i]) : z(static_cast<Eigen::Index>(i));
    double row = 0.0;
    for (const auto& e : w.rows[i]) row += e.w * (perm ? z((*perm)[e.j]) : z(static_cast<Eigen::Index>(e.j)));
    total += zi * row;
  }
  return total;
}

}  // namespace

double morans_i_statistic(const Eigen::VectorXd& residuals, const spatial::SpatialWeights& weights) {
  const auto n = static_cast<std::size_t>(residuals.size());
  require(weights.size() == n, ErrorCode::schema_mismatch, "Moran's I: weights and residuals differ in size");
  require(n >= 4, ErrorCode::invalid_argument, "Moran's I needs at least 4 observations");
  require(weights.total > 0, ErrorCode::invalid_argument, "Moran's I: weights sum to zero");
  const Eigen::VectorXd z = residuals.array() - residuals.mean();
  const double ss = z.squaredNorm();
  require(ss > 0, ErrorCode::numerical, "Moran's I is undefined for constant residuals");
  return static_cast<double>(n) / weights.total * cross_product(z, weights, nullptr) / ss;
}

MoranResult morans_i(const Eigen::VectorXd& residuals, const spatial::SpatialWeights& weights,
                     std::size_t n_permutations, std::uint64_t seed, Alternative alternative) {
  MoranResult r;
  r.I = morans_i_statistic(residuals, weights);
  const std::size_t n = static_cast<std::size_t>(residuals.size());
  r.expected = -1.0 / static_cast<double>(n - 1);
  r.n_permutations = n_permutations;
  r.alternative = alternative;
  r.weights = weights.descriptor;
  if (n_permutations == 0) return r;

  const Eigen::VectorXd z = residuals.array() - residuals.mean();
  const double scale = static_cast<double>(n) / weights.total / z.squaredNorm();
  std::vector<double> perms(n_permutations);
  parallel_for(n_permutations, [&](std::size_t k) {
    std::mt19937_64 rng(derive_seed(seed, k));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng() % i)]);
    perms[k] = scale * cross_product(z, weights, &perm);
  });

  std::size_t extreme = 0;
  for (double v : perms) {
    if (alternative == Alternative::greater) {
      extreme += v >= r.I;
    } else {
      extreme += std::abs(v - r.expected) >= std::abs(r.I - r.expected);
    }
  }
  r.p_value = static_cast<double>(1 + extreme) / static_cast<double>(n_permutations + 1);
  const double mean = std::accumulate(perms.begin(), perms.end(), 0.0) / static_cast<double>(n_permutations);
  double var = 0.0;
  for (double v : perms) var += (v - mean) * (v - mean);
  r.permuted_mean = mean;
  r.permuted_sd = n_permutations > 1 ? std::sqrt(var / static_cast<double>(n_permutations - 1)) : 0.0;
  r.permuted_min = *std::min_element(perms.begin(), perms.end());
  r.permuted_max = *std::max_element(perms.begin(), perms.end());
  return r;
}

MoranResult residual_moran(const Eigen::VectorXd& residuals, const std::vector<spatial::Point>& locations,
                           std::size_t n_permutations, std::uint64_t seed, std::size_t k) {
  const spatial::SpatialIndex index(locations);
  const auto w = spatial::knn_weights(index, std::min(k, locations.size() - 1), true);
  return morans_i(residuals, w, n_permutations, seed, Alternative::greater);
}

}  // namespace sdm::diag
