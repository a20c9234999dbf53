#include "sdm/forest/grf.hpp"

#include <algorithm>

#include "sdm/error.hpp"
#include "sdm/parallel.hpp"

namespace sdm::forest {

std::size_t GrfModel::dispatch(const spatial::Point& at) const {
  require(!local.empty(), ErrorCode::unfitted_model, "GRF model has no local forests");
  return index.nearest(at).id;
}

std::size_t default_grf_k(std::size_t n, std::size_t p) {
  return std::min(n, std::max((n + 3) / 4, p + 2));
}

GrfModel grf_fit(const data::FeatureTable& table, std::size_t k, const ForestParams& params,
                 std::uint64_t seed) {
  table.validate();
  const std::size_t n = table.rows();
  const std::size_t p = table.features();
  require(k <= n, ErrorCode::invalid_bandwidth,
          "GRF neighbourhood k=" + std::to_string(k) + " exceeds the " + std::to_string(n) + " stations");
  require(k >= p + 2, ErrorCode::invalid_bandwidth,
          "GRF neighbourhood k=" + std::to_string(k) + " is below p+2=" + std::to_string(p + 2));
  params.validate(p);

  GrfModel model;
  model.k = k;
  model.seed = seed;
  model.params = params;
  model.feature_names = table.column_names();
  model.locations = table.locations;
  model.index = spatial::SpatialIndex(table.locations);
  model.local.resize(n);
  model.neighbourhoods.resize(n);

  parallel_for(n, [&](std::size_t i) {
    std::vector<std::size_t> ids;
    for (const auto& nb : model.index.knn(table.locations[i], k)) ids.push_back(nb.id);
    std::sort(ids.begin(), ids.end());
    Eigen::MatrixXd X(static_cast<Eigen::Index>(k), table.X.cols());
    Eigen::VectorXd y(static_cast<Eigen::Index>(k));
    for (std::size_t r = 0; r < k; ++r) {
      X.row(static_cast<Eigen::Index>(r)) = table.X.row(static_cast<Eigen::Index>(ids[r]));
      y(static_cast<Eigen::Index>(r)) = table.y(static_cast<Eigen::Index>(ids[r]));
    }
    model.local[i] = rf_fit(X, y, model.feature_names, params, seed, 1);
    model.neighbourhoods[i] = std::move(ids);
  });
  return model;
}

double grf_predict(const GrfModel& model, const spatial::Point& at,
                   const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  require(static_cast<std::size_t>(x.size()) == model.feature_names.size(), ErrorCode::schema_mismatch,
          "GRF expects " + std::to_string(model.feature_names.size()) + " features, got " +
              std::to_string(x.size()));
  return model.local[model.dispatch(at)].predict_row(x);
}

Eigen::VectorXd grf_predict(const GrfModel& model, const std::vector<spatial::Point>& at,
                            const Eigen::MatrixXd& X) {
  require(at.size() == static_cast<std::size_t>(X.rows()), ErrorCode::schema_mismatch,
          "GRF prediction: locations and rows differ in count");
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = grf_predict(model, at[static_cast<std::size_t>(i)], X.row(i));
  return out;
}

Eigen::VectorXd grf_predict(const GrfModel& model, const data::FeatureTable& table) {
  Eigen::MatrixXd X(table.X.rows(), static_cast<Eigen::Index>(model.feature_names.size()));
  for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
    X.col(static_cast<Eigen::Index>(j)) = table.X.col(static_cast<Eigen::Index>(table.column_index(model.feature_names[j])));
  }
  return grf_predict(model, table.locations, X);
}

}  // namespace sdm::forest
