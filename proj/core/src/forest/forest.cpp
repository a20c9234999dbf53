#include "sdm/forest/forest.hpp"

#include <algorithm>
#include <numeric>

#include "sdm/error.hpp"
#include "sdm/parallel.hpp"

namespace sdm::forest {

std::size_t ForestParams::resolved_mtry(std::size_t p) const {
  return mtry == 0 ? std::max<std::size_t>(1, (p + 2) / 3) : mtry;
}

void ForestParams::validate(std::size_t p) const {
  require(n_trees >= 1, ErrorCode::invalid_argument, "forest needs n_trees >= 1");
  require(p >= 1, ErrorCode::invalid_argument, "forest needs at least one feature");
  require(resolved_mtry(p) <= p, ErrorCode::invalid_argument,
          "mtry " + std::to_string(mtry) + " exceeds the " + std::to_string(p) + " features");
  require(min_leaf >= 1, ErrorCode::invalid_argument, "min_leaf must be >= 1");
}

double ForestModel::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  require(!trees.empty(), ErrorCode::unfitted_model, "forest has no trees");
  double total = 0.0;
  for (const auto& t : trees) total += t.predict(x);
  return total / static_cast<double>(trees.size());
}

ForestModel rf_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const std::vector<std::string>& names, const ForestParams& params,
                   std::uint64_t seed, unsigned workers) {
  const std::size_t n = static_cast<std::size_t>(X.rows());
  const std::size_t p = static_cast<std::size_t>(X.cols());
  require(y.size() == X.rows(), ErrorCode::schema_mismatch, "forest: X and y lengths differ");
  require(names.size() == p, ErrorCode::schema_mismatch, "forest: feature name count differs from X");
  require(n >= 2, ErrorCode::invalid_argument, "forest needs at least 2 rows");
  require(X.allFinite() && y.allFinite(), ErrorCode::invalid_argument, "forest: non-finite input");
  params.validate(p);

  ForestModel model;
  model.params = params;
  model.seed = seed;
  model.feature_names = names;
  model.base_value = y.mean();
  if (y.maxCoeff() == y.minCoeff()) {
    model.warnings.push_back("constant target: every tree is a single leaf");
  }

  TreeParams tp;
  tp.mtry = params.resolved_mtry(p);
  tp.min_leaf = params.min_leaf;
  tp.max_depth = params.max_depth;

  model.trees.resize(params.n_trees);
  parallel_for(params.n_trees, [&](std::size_t t) {
    std::mt19937_64 rng(derive_seed(seed, t));
    std::vector<std::size_t> sample(n);
    if (params.bootstrap) {
      for (auto& s : sample) s = static_cast<std::size_t>(rng() % n);
    } else {
      std::iota(sample.begin(), sample.end(), std::size_t{0});
    }
    model.trees[t] = grow_tree(X, y, std::move(sample), tp, rng);
  }, workers);
  return model;
}

ForestModel rf_fit(const data::FeatureTable& table, const ForestParams& params, std::uint64_t seed,
                   bool use_coordinates) {
  table.validate();
  const data::FeatureTable t = use_coordinates ? table.with_coordinates() : table;
  ForestModel model = rf_fit(t.X, t.y, t.column_names(), params, seed);
  model.uses_coordinates = use_coordinates;
  return model;
}

Eigen::VectorXd rf_predict(const ForestModel& model, const Eigen::MatrixXd& X) {
  require(static_cast<std::size_t>(X.cols()) == model.features(), ErrorCode::schema_mismatch,
          "forest expects " + std::to_string(model.features()) + " feature columns, got " +
              std::to_string(X.cols()));
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = model.predict_row(X.row(i));
  return out;
}

Eigen::MatrixXd model_design(const ForestModel& model, const data::FeatureTable& table) {
  const data::FeatureTable t =
      model.uses_coordinates && !table.find_column("coord_x") ? table.with_coordinates() : table;
  Eigen::MatrixXd X(t.X.rows(), static_cast<Eigen::Index>(model.features()));
  for (std::size_t j = 0; j < model.features(); ++j) {
    const auto idx = t.find_column(model.feature_names[j]);
    require(idx.has_value(), ErrorCode::schema_mismatch,
            "input lacks model feature '" + model.feature_names[j] + "'");
    X.col(static_cast<Eigen::Index>(j)) = t.X.col(static_cast<Eigen::Index>(*idx));
  }
  return X;
}

Eigen::VectorXd rf_predict(const ForestModel& model, const data::FeatureTable& table) {
  return rf_predict(model, model_design(model, table));
}

}  // namespace sdm::forest
