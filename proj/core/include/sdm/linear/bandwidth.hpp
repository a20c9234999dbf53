#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string_view>
#include <vector>

#include "sdm/dataset/feature_table.hpp"
#include "sdm/linear/local_solver.hpp"
#include "sdm/spatial/kernel.hpp"

namespace sdm::linear {

enum class Criterion { aicc, cv };

std::string_view to_string(Criterion c);
Criterion parse_criterion(std::string_view text);

struct CriterionPoint {
  double bandwidth;  // meters or neighbour count
  double score;
};

struct BandwidthSelection {
  spatial::Bandwidth bandwidth;
  double score = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<CriterionPoint> trace;  // every evaluation, in order
};

/// Golden-section minimisation of a criterion over [lower, upper]. Integer
/// mode rounds candidates and stops once the bracket is narrower than one
/// unit; otherwise it stops when the bracket falls below `tolerance`.
/// Non-finite scores count as +inf. Returns the best evaluated point.
BandwidthSelection golden_section(const std::function<double(double)>& score, double lower,
                                  double upper, bool integer, double tolerance,
                                  std::size_t max_iterations = 200);

/// GWR criterion value at one bandwidth: AICc, or the leave-one-out CV
/// score (mean squared error with each location's own weight set to zero).
/// Singular local designs yield +inf.
double gwr_criterion(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                     const LocalContext& context, spatial::Kernel kernel,
                     const spatial::Bandwidth& bandwidth, Criterion criterion);

/// Search bounds: fixed [max (p+2)-NN distance, diameter]; adaptive [p+2, n].
std::pair<double, double> bandwidth_bounds(const LocalContext& context, std::size_t p,
                                           spatial::Bandwidth::Mode mode);

BandwidthSelection select_bandwidth(const data::FeatureTable& table, spatial::Kernel kernel,
                                    spatial::Bandwidth::Mode mode, Criterion criterion);
BandwidthSelection select_bandwidth(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    const std::shared_ptr<const LocalContext>& context,
                                    spatial::Kernel kernel, spatial::Bandwidth::Mode mode,
                                    Criterion criterion);

}  // namespace sdm::linear
