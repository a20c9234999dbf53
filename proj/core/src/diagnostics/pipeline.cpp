#include "sdm/diagnostics/pipeline.hpp"

#include "sdm/error.hpp"
#include "sdm/forest/grf.hpp"
#include "sdm/linear/gwr.hpp"
#include "sdm/linear/ols.hpp"

namespace sdm::diag {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::ols: return "ols";
    case ModelKind::gwr: return "gwr";
    case ModelKind::mgwr: return "mgwr";
    case ModelKind::rf: return "rf";
    case ModelKind::rf_coords: return "rf_coords";
    case ModelKind::grf: return "grf";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view text) {
  for (ModelKind k : {ModelKind::ols, ModelKind::gwr, ModelKind::mgwr, ModelKind::rf,
                      ModelKind::rf_coords, ModelKind::grf}) {
    if (text == to_string(k)) return k;
  }
  fail(ErrorCode::invalid_argument, "unknown model kind '" + std::string(text) +
                                        "' (expected ols, gwr, mgwr, rf, rf_coords or grf)");
}

std::string_view display_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::ols: return "OLS Regression";
    case ModelKind::gwr: return "GWR";
    case ModelKind::mgwr: return "MGWR";
    case ModelKind::rf: return "Global Random Forest";
    case ModelKind::rf_coords: return "Global RF with coordinates";
    case ModelKind::grf: return "Geographical Random Forest";
  }
  return "unknown";
}

namespace {

Eigen::MatrixXd columns_of(const data::FeatureTable& t, const std::vector<std::string>& names) {
  Eigen::MatrixXd X(t.X.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    X.col(static_cast<Eigen::Index>(j)) = t.X.col(static_cast<Eigen::Index>(t.column_index(names[j])));
  }
  return X;
}

}  // namespace

Pipeline make_pipeline(const ModelSpec& spec) {
  return [spec](const data::FeatureTable& train_in, const data::FeatureTable& test) {
    FoldPrediction out;
    data::FeatureTable train = train_in;
    if (spec.select_features) {
      const auto chosen = selection::lasso_select(data::standardize(train), spec.selection).selected();
      require(!chosen.empty(), ErrorCode::numerical, "feature selection kept no features");
      train = train.select_columns(chosen);
    }
    out.features = train.column_names();
    const Eigen::MatrixXd Xtest = columns_of(test, out.features);

    switch (spec.kind) {
      case ModelKind::ols: {
        out.predictions = linear::ols_fit(train).predict(Xtest);
        break;
      }
      case ModelKind::gwr: {
        const spatial::Bandwidth bw =
            spec.bandwidth ? *spec.bandwidth
                           : linear::select_bandwidth(train, spec.kernel, spec.mode, spec.criterion).bandwidth;
        out.bandwidth = spatial::to_string(bw);
        const auto fit = linear::gwr_fit(train, spec.kernel, bw);
        const auto pred = linear::gwr_predict(fit, test.locations, Xtest);
        for (std::size_t i = 0; i < pred.ok.size(); ++i) {
          require(pred.ok[i], ErrorCode::rank_deficient, pred.errors[i]);
        }
        out.predictions = pred.values;
        break;
      }
      case ModelKind::mgwr:
        fail(ErrorCode::unsupported, "MGWR does not support out-of-sample prediction");
      case ModelKind::rf:
      case ModelKind::rf_coords: {
        const auto model = forest::rf_fit(train, spec.forest, spec.seed, spec.kind == ModelKind::rf_coords);
        data::FeatureTable t = test.select_columns(out.features);
        out.predictions = forest::rf_predict(model, t);
        break;
      }
      case ModelKind::grf: {
        const std::size_t k = spec.grf_k ? std::min(spec.grf_k, train.rows())
                                         : forest::default_grf_k(train.rows(), train.features());
        out.bandwidth = "adaptive:" + std::to_string(k);
        const auto model = forest::grf_fit(train, k, spec.forest, spec.seed);
        out.predictions = forest::grf_predict(model, test.locations, Xtest);
        break;
      }
    }
    return out;
  };
}

}  // namespace sdm::diag
