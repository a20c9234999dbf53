#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "sdm/spatial/weights.hpp"

namespace sdm::diag {

enum class Alternative { greater, two_sided };

struct MoranResult {
  double I = 0.0;
  double expected = 0.0;  // -1 / (n - 1)
  double p_value = 1.0;
  std::size_t n_permutations = 0;
  Alternative alternative = Alternative::greater;
  double permuted_mean = 0.0;
  double permuted_sd = 0.0;
  double permuted_min = 0.0;
  double permuted_max = 0.0;
  std::string weights;
};

/// I = n / W * sum_ij w_ij z_i z_j / sum_i z_i^2 on mean-centred residuals.
double morans_i_statistic(const Eigen::VectorXd& residuals, const spatial::SpatialWeights& weights);

/// Pseudo p from random relabelling of residuals. One-sided:
/// (1 + #{I_perm >= I}) / (N + 1); two-sided compares |I - E[I]|.
MoranResult morans_i(const Eigen::VectorXd& residuals, const spatial::SpatialWeights& weights,
                     std::size_t n_permutations = 999, std::uint64_t seed = 1,
                     Alternative alternative = Alternative::greater);

/// Residual test with the default 8-nearest-neighbour row-standardized weights.
MoranResult residual_moran(const Eigen::VectorXd& residuals, const std::vector<spatial::Point>& locations,
                           std::size_t n_permutations = 999, std::uint64_t seed = 1,
                           std::size_t k = 8);

}  // namespace sdm::diag
