#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sdm/dataset/feature_table.hpp"
#include "sdm/forest/forest.hpp"
#include "sdm/spatial/spatial_index.hpp"

namespace sdm::forest {

/// One local forest per training station, each grown on that station's k
/// nearest training stations (itself included).
struct GrfModel {
  std::vector<ForestModel> local;
  std::vector<spatial::Point> locations;
  std::vector<std::vector<std::size_t>> neighbourhoods;  // ascending training row ids
  std::size_t k = 0;
  std::uint64_t seed = 0;
  ForestParams params;
  std::vector<std::string> feature_names;
  spatial::SpatialIndex index;

  /// Nearest training station (ties to the lowest id).
  std::size_t dispatch(const spatial::Point& at) const;
};

/// ceil(n / 4), raised to p + 2 when needed and capped at n.
std::size_t default_grf_k(std::size_t n, std::size_t p);

/// Every local forest uses the same seed, so k = n reproduces rf_fit.
GrfModel grf_fit(const data::FeatureTable& table, std::size_t k, const ForestParams& params,
                 std::uint64_t seed);

double grf_predict(const GrfModel& model, const spatial::Point& at,
                   const Eigen::Ref<const Eigen::RowVectorXd>& x);
Eigen::VectorXd grf_predict(const GrfModel& model, const std::vector<spatial::Point>& at,
                            const Eigen::MatrixXd& X);
Eigen::VectorXd grf_predict(const GrfModel& model, const data::FeatureTable& table);

}  // namespace sdm::forest
