#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "sdm/spatial/geometry.hpp"
#include "sdm/spatial/kernel.hpp"
#include "sdm/spatial/spatial_index.hpp"

namespace sdm::linear {

struct WeightEntry {
  std::uint32_t id;
  double w;
};

/// Distance bookkeeping for local regressions over a fixed set of calibration
/// points. Sorted neighbour lists are cached for moderate n so repeated
/// bandwidth evaluations avoid re-querying the tree.
class LocalContext {
 public:
  explicit LocalContext(std::vector<spatial::Point> locations);

  std::size_t size() const { return index_.size(); }
  const spatial::SpatialIndex& index() const { return index_; }
  const spatial::Point& location(std::size_t i) const { return index_.point(i); }

  /// Bandwidth in meters at calibration point i (self excluded for adaptive).
  double bandwidth_at(std::size_t i, const spatial::Bandwidth& bw) const;
  /// Positive kernel weights at calibration point i for a resolved bandwidth.
  void weights_at(std::size_t i, spatial::Kernel kernel, double bandwidth,
                  std::vector<WeightEntry>& out) const;

  /// Same for an arbitrary query location (prediction).
  double bandwidth_at(const spatial::Point& at, const spatial::Bandwidth& bw) const;
  void weights_at(const spatial::Point& at, spatial::Kernel kernel, double bandwidth,
                  std::vector<WeightEntry>& out) const;

  /// Largest pairwise distance between calibration points.
  double diameter() const;

 private:
  struct Sorted {
    std::uint32_t id;
    double d;
  };
  bool cached() const { return !sorted_.empty(); }
  const Sorted* row(std::size_t i) const { return sorted_.data() + i * size(); }

  spatial::SpatialIndex index_;
  std::vector<Sorted> sorted_;  // n rows of n entries, each ordered by (distance, id)
};

/// Result of one weighted least-squares solve.
struct LocalSolution {
  Eigen::VectorXd beta;
  Eigen::MatrixXd xtwx_inv;
};

/// Solves (X^T W X) beta = X^T W y with a column-pivoted QR whose rank
/// threshold is 1e-10 of the largest pivot. Returns nullopt when rank-deficient.
std::optional<LocalSolution> solve_weighted(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                                            const std::vector<WeightEntry>& weights);

/// Design matrix with a leading column of ones.
Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& X);

/// Corrected AIC from RSS, n and trace(S); sigma is the ML estimate sqrt(RSS/n).
/// Returns +inf when n - 2 - trS <= 0.
double aicc_from_rss(double rss, double n, double trS);

}  // namespace sdm::linear
