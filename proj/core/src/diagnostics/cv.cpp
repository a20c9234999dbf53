#include "sdm/diagnostics/cv.hpp"

#include <exception>

#include "sdm/dataset/folds.hpp"
#include "sdm/diagnostics/metrics.hpp"
#include "sdm/error.hpp"
#include "sdm/parallel.hpp"

namespace sdm::diag {

CVResult kfold_cv(const data::FeatureTable& table, const Pipeline& pipeline, std::size_t k,
                  std::uint64_t seed, unsigned workers) {
  table.validate();
  require(table.rows() >= k, ErrorCode::invalid_argument,
          "k-fold CV needs at least k=" + std::to_string(k) + " rows");
  CVResult r;
  r.k = k;
  r.seed = seed;
  r.folds = data::make_folds(table.rows(), k, seed);
  r.fold_results.resize(k);
  r.predictions = Eigen::VectorXd::Zero(table.y.size());

  parallel_for(k, [&](std::size_t f) {
    FoldResult& fr = r.fold_results[f];
    fr.fold = f;
    fr.test_rows = r.folds[f];
    const auto train = table.select_rows(data::training_rows(r.folds, f));
    const auto test = table.select_rows(r.folds[f]);
    FoldPrediction pred;
    try {
      pred = pipeline(train, test);
    } catch (const Error& e) {
      fail(e.code(), "fold " + std::to_string(f) + ": " + e.what());
    } catch (const std::exception& e) {
      fail(ErrorCode::numerical, "fold " + std::to_string(f) + ": " + e.what());
    }
    require(pred.predictions.size() == test.y.size(), ErrorCode::schema_mismatch,
            "fold " + std::to_string(f) + ": pipeline returned the wrong number of predictions");
    fr.mse = (test.y - pred.predictions).squaredNorm() / static_cast<double>(test.y.size());
    fr.features = std::move(pred.features);
    fr.bandwidth = std::move(pred.bandwidth);
    for (std::size_t i = 0; i < fr.test_rows.size(); ++i) {
      r.predictions(static_cast<Eigen::Index>(fr.test_rows[i])) = pred.predictions(static_cast<Eigen::Index>(i));
    }
  }, workers);

  for (const auto& fr : r.fold_results) r.cv_mean += fr.mse;
  r.cv_mean /= static_cast<double>(k);
  const MetricsReport m = metrics(table.y, r.predictions);
  r.oos_rmse = m.rmse;
  r.oos_r2 = m.r2;
  return r;
}

}  // namespace sdm::diag
