#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "sdm/dataset/folds.hpp"
#include "sdm/dataset/synth.hpp"
#include "sdm/diagnostics/ablation.hpp"
#include "sdm/diagnostics/cv.hpp"
#include "sdm/diagnostics/metrics.hpp"
#include "sdm/diagnostics/moran.hpp"
#include "sdm/diagnostics/report.hpp"
#include "sdm/error.hpp"
#include "sdm/linear/ols.hpp"
#include "test_support.hpp"

using namespace sdm;
using namespace sdm::diag;
using sdm::testing::make_table;
using sdm::testing::random_matrix;
using sdm::testing::random_points;

namespace {

// Unit grid with a small deterministic jitter so k-NN sets have no ties.
std::vector<spatial::Point> jittered_grid(int side, std::uint64_t seed) {
  const auto jitter = random_points(static_cast<std::size_t>(side * side), 2e-3, seed);
  std::vector<spatial::Point> out;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const auto& j = jitter[out.size()];
      out.push_back({c + j.x - 1e-3, r + j.y - 1e-3});
    }
  }
  return out;
}

// Brute-force row-standardized k-NN Moran's I in long double.
double moran_oracle(const Eigen::VectorXd& r, const std::vector<spatial::Point>& pts, std::size_t k) {
  const std::size_t n = pts.size();
  long double mean = 0;
  for (std::size_t i = 0; i < n; ++i) mean += r(static_cast<Eigen::Index>(i));
  mean /= n;
  long double num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) d.push_back({std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y), j});
    }
    std::sort(d.begin(), d.end());
    const long double zi = r(static_cast<Eigen::Index>(i)) - mean;
    for (std::size_t m = 0; m < k; ++m) {
      num += zi * (r(static_cast<Eigen::Index>(d[m].second)) - mean) / k;
    }
    den += zi * zi;
  }
  // Row-standardized weights sum to n, so n / W = 1.
  return static_cast<double>(num / den);
}

spatial::SpatialWeights knn(const std::vector<spatial::Point>& pts, std::size_t k) {
  return spatial::knn_weights(spatial::SpatialIndex(pts), k, true);
}

data::FeatureTable noisy_linear(std::size_t n, std::uint64_t seed) {
  const Eigen::MatrixXd X = random_matrix(static_cast<Eigen::Index>(n), 2, seed);
  const Eigen::VectorXd e = random_matrix(static_cast<Eigen::Index>(n), 1, seed + 1).col(0);
  const Eigen::VectorXd y = (1.0 + 2.0 * X.col(0).array() - X.col(1).array() + 0.5 * e.array()).matrix();
  return make_table(random_points(n, 20'000.0, seed + 2), X, y);
}

Pipeline ols_pipeline() {
  ModelSpec spec;
  spec.kind = ModelKind::ols;
  return make_pipeline(spec);
}

}  // namespace

TEST(Metrics, RmseWorkedExample) {
  const Eigen::Vector2d y(0, 0), yhat(3, 4);
  EXPECT_NEAR(rmse(y, yhat), std::sqrt(12.5), 1e-12);
  EXPECT_NEAR(rmse(y, yhat), 3.53553, 1e-5);
}

TEST(Metrics, MeanPredictionGivesZeroR2) {
  const Eigen::VectorXd y = random_matrix(30, 1, 4).col(0);
  const Eigen::VectorXd yhat = Eigen::VectorXd::Constant(30, y.mean());
  const auto m = metrics(y, yhat, 3.0);
  EXPECT_NEAR(m.r2, 0.0, 1e-12);
  EXPECT_LT(m.adjusted_r2, 0.0);
  EXPECT_NEAR(m.adjusted_r2, 1.0 - 29.0 / 27.0, 1e-12);
}

TEST(Metrics, SquaredRmseTimesNIsSse) {
  const Eigen::VectorXd y = random_matrix(57, 1, 5).col(0) * 40.0;
  const Eigen::VectorXd yhat = y + random_matrix(57, 1, 6).col(0);
  const auto m = metrics(y, yhat);
  const double sse = (y - yhat).squaredNorm();
  EXPECT_NEAR(m.rmse * m.rmse * 57.0, sse, 1e-9 * sse);
  EXPECT_GE(m.rmse, 0.0);
}

TEST(Metrics, AdjustedNeverAboveR2ForSeveralParameters) {
  const Eigen::VectorXd y = random_matrix(40, 1, 7).col(0);
  const Eigen::VectorXd yhat = 0.7 * y + 0.3 * random_matrix(40, 1, 8).col(0);
  for (double trS : {1.5, 3.0, 10.0, 25.0}) {
    const auto m = metrics(y, yhat, trS);
    EXPECT_LE(m.adjusted_r2, m.r2) << trS;
  }
}

TEST(Metrics, OlsAiccMatchesExtendedPrecisionFormula) {
  const auto t = noisy_linear(120, 11);
  const auto fit = linear::ols_fit(t);
  const long double n = 120, trS = 3;
  long double rss = 0;
  for (Eigen::Index i = 0; i < fit.residuals.size(); ++i) {
    rss += static_cast<long double>(fit.residuals(i)) * fit.residuals(i);
  }
  const long double sigma = std::sqrt(rss / n);
  const long double oracle = 2 * n * std::log(sigma) + n * std::log(2 * std::numbers::pi_v<long double>) +
                             n * (n + trS) / (n - 2 - trS);
  const auto m = metrics(fit.y, fit.fitted, 3.0, std::sqrt(fit.rss / 120.0));
  ASSERT_TRUE(m.aicc.has_value());
  EXPECT_NEAR(*m.aicc, static_cast<double>(oracle), 1e-9);
  EXPECT_NEAR(fit.aicc, static_cast<double>(oracle), 1e-9);
  EXPECT_DOUBLE_EQ(fit.trS, 3.0);
}

TEST(Metrics, AiccNeedsBothTraceAndSigma) {
  const Eigen::Vector3d y(1, 2, 4), yhat(1.1, 2.1, 3.7);
  EXPECT_FALSE(metrics(y, yhat).aicc.has_value());
  EXPECT_FALSE(metrics(y, yhat, 2.0).aicc.has_value());
  EXPECT_FALSE(metrics(y, yhat, std::nullopt, 0.3).aicc.has_value());
}

TEST(Metrics, AiccIncreasesWithSigma) {
  for (double trS : {2.0, 7.5, 30.0}) {
    double prev = -std::numeric_limits<double>::infinity();
    for (double sigma = 0.05; sigma < 20; sigma *= 1.7) {
      const double a = aicc(200.0, sigma, trS);
      EXPECT_GT(a, prev);
      prev = a;
    }
  }
  EXPECT_TRUE(std::isinf(aicc(10.0, 1.0, 8.0)));
}

TEST(Metrics, ConstantTargetThrows) {
  const Eigen::Vector3d y(2, 2, 2), yhat(1, 2, 3);
  try {
    metrics(y, yhat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::numerical);
  }
  EXPECT_THROW(metrics(y, Eigen::Vector2d(1, 2)), Error);
}

TEST(Moran, CheckerboardIsNegativeAndMatchesOracle) {
  const auto pts = jittered_grid(10, 3);
  Eigen::VectorXd r(100);
  for (int i = 0; i < 100; ++i) r(i) = ((i / 10 + i % 10) % 2) ? 1.0 : -1.0;
  const auto w = knn(pts, 4);
  const double I = morans_i_statistic(r, w);
  EXPECT_LT(I, 0.0);
  EXPECT_NEAR(I, moran_oracle(r, pts, 4), 1e-12);
  // Non-binary residuals as well.
  const Eigen::VectorXd r2 = random_matrix(100, 1, 9).col(0);
  EXPECT_NEAR(morans_i_statistic(r2, w), moran_oracle(r2, pts, 4), 1e-12);
}

TEST(Moran, CheckerboardTwoSidedVersusGreater) {
  const auto pts = jittered_grid(10, 3);
  Eigen::VectorXd r(100);
  for (int i = 0; i < 100; ++i) r(i) = ((i / 10 + i % 10) % 2) ? 1.0 : -1.0;
  const auto w = knn(pts, 4);
  EXPECT_GT(morans_i(r, w, 499, 2, Alternative::greater).p_value, 0.99);
  EXPECT_NEAR(morans_i(r, w, 499, 2, Alternative::two_sided).p_value, 1.0 / 500.0, 1e-15);
}

TEST(Moran, SmoothGradientIsSignificant) {
  const auto pts = random_points(200, 10'000.0, 21);
  const Eigen::VectorXd e = random_matrix(200, 1, 22).col(0);
  Eigen::VectorXd r(200);
  for (Eigen::Index i = 0; i < 200; ++i) r(i) = pts[static_cast<std::size_t>(i)].y / 10'000.0 + 0.1 * e(i);
  const auto res = morans_i(r, knn(pts, 8), 999, 5);
  EXPECT_GT(res.I, 0.5);
  EXPECT_LE(res.p_value, 0.005);
  EXPECT_EQ(res.n_permutations, 999u);
  EXPECT_NEAR(res.expected, -1.0 / 199.0, 1e-15);
  EXPECT_LT(res.permuted_max, res.I);
}

TEST(Moran, CalibratedUnderIndependence) {
  const auto pts = random_points(100, 10'000.0, 31);
  const auto w = knn(pts, 8);
  int rejections = 0;
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    const Eigen::VectorXd r = random_matrix(100, 1, 1000 + rep).col(0);
    rejections += morans_i(r, w, 999, rep + 1).p_value <= 0.05;
  }
  EXPECT_LE(rejections, 20);
}

TEST(Moran, PValueBoundsAndDeterminism) {
  const auto pts = random_points(60, 5'000.0, 41);
  const auto w = knn(pts, 6);
  const Eigen::VectorXd r = random_matrix(60, 1, 42).col(0);
  const auto a = morans_i(r, w, 199, 8);
  const auto b = morans_i(r, w, 199, 8);
  EXPECT_EQ(a.p_value, b.p_value);
  EXPECT_EQ(a.permuted_mean, b.permuted_mean);
  EXPECT_GE(a.p_value, 1.0 / 200.0);
  EXPECT_LE(a.p_value, 1.0);
  EXPECT_NE(a.weights.find("knn"), std::string::npos);
}

TEST(Moran, InvariantToShiftAndPositiveScale) {
  const auto pts = random_points(80, 5'000.0, 51);
  const auto w = knn(pts, 8);
  Eigen::VectorXd r = random_matrix(80, 1, 52).col(0);
  for (Eigen::Index i = 0; i < 80; ++i) r(i) += pts[static_cast<std::size_t>(i)].x / 5'000.0;
  const auto base = morans_i(r, w, 999, 3);
  const Eigen::VectorXd shifted = (r.array() * 37.5 + 1e4).matrix();
  const auto moved = morans_i(shifted, w, 999, 3);
  EXPECT_EQ(base.p_value, moved.p_value);
  EXPECT_NEAR(base.I, moved.I, 1e-10);
}

TEST(Moran, ConstantResidualsThrow) {
  const auto pts = random_points(10, 100.0, 61);
  EXPECT_THROW(morans_i(Eigen::VectorXd::Constant(10, 3.0), knn(pts, 3)), Error);
  EXPECT_THROW(morans_i(Eigen::VectorXd::Zero(9), knn(pts, 3)), Error);
}

TEST(KFold, FoldsPartitionRows) {
  const auto t = noisy_linear(103, 71);
  const auto cv = kfold_cv(t, ols_pipeline(), 10, 4);
  std::vector<std::size_t> all;
  std::size_t lo = 1000, hi = 0;
  for (const auto& f : cv.folds) {
    all.insert(all.end(), f.begin(), f.end());
    lo = std::min(lo, f.size());
    hi = std::max(hi, f.size());
  }
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expected(103);
  std::iota(expected.begin(), expected.end(), std::size_t{0});
  EXPECT_EQ(all, expected);
  EXPECT_LE(hi - lo, 1u);
  EXPECT_EQ(cv.fold_results.size(), 10u);
}

TEST(KFold, SameSeedSameResult) {
  const auto t = noisy_linear(90, 81);
  const auto a = kfold_cv(t, ols_pipeline(), 10, 9);
  const auto b = kfold_cv(t, ols_pipeline(), 10, 9, 1);
  EXPECT_EQ(a.folds, b.folds);
  EXPECT_EQ(a.oos_rmse, b.oos_rmse);
  EXPECT_EQ(a.predictions, b.predictions);
  const auto c = kfold_cv(t, ols_pipeline(), 10, 10);
  EXPECT_NE(a.folds, c.folds);
}

TEST(KFold, AssignmentDependsOnlyOnIndices) {
  auto t = noisy_linear(64, 91);
  const auto a = kfold_cv(t, ols_pipeline(), 8, 2);
  t.y = t.y.reverse().eval();
  t.X = t.X.colwise().reverse().eval();
  const auto b = kfold_cv(t, ols_pipeline(), 8, 2);
  EXPECT_EQ(a.folds, b.folds);
  EXPECT_EQ(a.folds, data::make_folds(64, 8, 2));
}

TEST(KFold, PooledMetricsAndFoldMean) {
  const auto t = noisy_linear(150, 101);
  const auto cv = kfold_cv(t, ols_pipeline(), 10, 1);
  const auto m = metrics(t.y, cv.predictions);
  EXPECT_DOUBLE_EQ(cv.oos_r2, m.r2);
  EXPECT_DOUBLE_EQ(cv.oos_rmse, m.rmse);
  double mean = 0;
  for (const auto& f : cv.fold_results) mean += f.mse;
  EXPECT_NEAR(cv.cv_mean, mean / 10.0, 1e-12);
  // Held-out predictions match an OLS refit on the complementary rows.
  const auto& fold = cv.folds[3];
  const auto fit = linear::ols_fit(t.select_rows(data::training_rows(cv.folds, 3)));
  const auto held = t.select_rows(fold);
  const Eigen::VectorXd direct = fit.predict(held.X);
  for (std::size_t i = 0; i < fold.size(); ++i) {
    EXPECT_NEAR(cv.predictions(static_cast<Eigen::Index>(fold[i])), direct(static_cast<Eigen::Index>(i)), 1e-10);
  }
}

TEST(KFold, PipelineNeverSeesTestRowsInTraining) {
  const auto t = noisy_linear(50, 111);
  const Pipeline spy = [](const data::FeatureTable& train, const data::FeatureTable& test) {
    const std::set<std::string> ids(train.station_ids.begin(), train.station_ids.end());
    for (const auto& id : test.station_ids) {
      if (ids.count(id)) throw std::runtime_error("leak " + id);
    }
    if (train.rows() + test.rows() != 50) throw std::runtime_error("lost rows");
    FoldPrediction p;
    p.predictions = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(test.rows()), train.y.mean());
    return p;
  };
  EXPECT_NO_THROW(kfold_cv(t, spy, 5, 3));
}

TEST(KFold, FailingFoldIsNamed) {
  const auto t = noisy_linear(40, 121);
  const auto folds = data::make_folds(40, 4, 6);
  const std::string marker = t.station_ids[folds[2][0]];
  const Pipeline picky = [marker](const data::FeatureTable&, const data::FeatureTable& test) {
    for (const auto& id : test.station_ids) {
      if (id == marker) fail(ErrorCode::numerical, "boom");
    }
    FoldPrediction p;
    p.predictions = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(test.rows()));
    return p;
  };
  try {
    kfold_cv(t, picky, 4, 6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("fold 2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
  }
  EXPECT_THROW(kfold_cv(t.select_rows({0, 1, 2}), ols_pipeline(), 4, 1), Error);
}

TEST(KFold, SelectionRunsPerFold) {
  auto t = noisy_linear(120, 131);
  const Eigen::MatrixXd noise = random_matrix(120, 3, 132);
  Eigen::MatrixXd X(120, 5);
  X << t.X, noise;
  t = make_table(t.locations, X, t.y);
  ModelSpec spec;
  spec.kind = ModelKind::ols;
  spec.select_features = true;
  const auto cv = kfold_cv(t, make_pipeline(spec), 5, 1);
  for (const auto& f : cv.fold_results) {
    EXPECT_NE(std::find(f.features.begin(), f.features.end(), "x1"), f.features.end());
    EXPECT_FALSE(f.features.empty());
  }
}

TEST(KFold, GwrBeatsOlsOnTwoClusters) {
  auto cfg = data::synth_preset("two-cluster");
  cfg.n = 300;
  const auto t = data::synth_generate(cfg, 7).table;
  ModelSpec gwr;
  gwr.kind = ModelKind::gwr;
  const auto g = kfold_cv(t, make_pipeline(gwr), 10, 1);
  const auto o = kfold_cv(t, ols_pipeline(), 10, 1);
  EXPECT_GT(g.oos_r2, o.oos_r2);
  for (const auto& f : g.fold_results) EXPECT_EQ(f.bandwidth.rfind("adaptive:", 0), 0u) << f.bandwidth;
}

TEST(Ablation, SingleConfigMatchesDirectCv) {
  const auto t = data::standardize(noisy_linear(120, 141));
  EvaluationOptions opt;
  opt.moran_permutations = 99;
  AblationConfig cfg{spatial::Bandwidth::Mode::adaptive, linear::Criterion::cv, spatial::Kernel::gaussian};
  const auto rows = ablate(t, {cfg}, opt);
  ASSERT_EQ(rows.size(), 1u);
  ModelSpec spec;
  spec.kind = ModelKind::gwr;
  spec.mode = cfg.mode;
  spec.criterion = cfg.criterion;
  spec.kernel = cfg.kernel;
  const auto cv = kfold_cv(t, make_pipeline(spec), 10, 1);
  EXPECT_EQ(*rows[0].oos_r2, cv.oos_r2);
  EXPECT_EQ(*rows[0].oos_rmse, cv.oos_rmse);
  EXPECT_EQ(rows[0].fixed_adaptive, "Adaptive");
  EXPECT_EQ(rows[0].bandwidth_selection, "CV");
  EXPECT_EQ(rows[0].kernel, "Gaussian");
  const auto row = evaluate_model(t, spec, opt);
  EXPECT_EQ(*row.aicc, *rows[0].aicc);
  EXPECT_EQ(*row.moran_p, *rows[0].moran_p);
}

TEST(Ablation, FullGridOnGeneratorData) {
  auto cfg = data::synth_preset("two-cluster");
  cfg.n = 200;
  const auto t = data::synth_generate(cfg, 3).table;
  const auto grid = full_grid({spatial::Kernel::bisquare, spatial::Kernel::gaussian});
  ASSERT_EQ(grid.size(), 8u);
  EvaluationOptions opt;
  opt.moran_permutations = 99;
  const auto rows = ablate(t, grid, opt);
  ASSERT_EQ(rows.size(), 8u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ASSERT_TRUE(rows[i].error.empty()) << rows[i].error;
    EXPECT_GE(*rows[i].oos_r2, 0.0);
    EXPECT_LE(*rows[i].oos_r2, 1.0);
    if (i) EXPECT_LE(*rows[i - 1].oos_r2, *rows[i].oos_r2);
  }
  EXPECT_THROW(ablate(t, {}, opt), Error);
}

TEST(Ablation, FailedModelKeepsItsRow) {
  const auto t = noisy_linear(60, 151);
  ModelSpec bad;
  bad.kind = ModelKind::gwr;
  bad.bandwidth = spatial::Bandwidth::fixed(1e-3);  // no neighbours within 1 mm
  ModelSpec ols;
  ols.kind = ModelKind::ols;
  EvaluationOptions opt;
  opt.moran_permutations = 99;
  const auto rows = evaluate_models(t, {bad, ols}, opt);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].error.empty());
  EXPECT_TRUE(rows[1].error.empty());
  EXPECT_TRUE(rows[1].loocv_r2.has_value());
}

TEST(Report, HeadersMatchPublishedLayouts) {
  const std::vector<std::string> models{"Algorithm", "Fixed/Adaptive", "Kernel", "Adjusted R²", "AICc",
                                        "Out-of-Sample RMSE", "Out-of-Sample R²", "LOOCV R²",
                                        "Residual Moran's I P-Value"};
  EXPECT_EQ(table_header(TableLayout::models), models);
  const std::vector<std::string> settings{"Algorithm", "Fixed/Adaptive", "Bandwidth Selection", "Kernel",
                                          "Adjusted R²", "AICc", "Out-of-Sample RMSE", "Out-of-Sample R²",
                                          "Residual Moran's I P-Value"};
  EXPECT_EQ(table_header(TableLayout::gwr_settings), settings);
}

TEST(Report, CsvAndTextOutput) {
  ComparisonRow ok;
  ok.algorithm = "GWR";
  ok.fixed_adaptive = "Fixed";
  ok.bandwidth_selection = "AICc";
  ok.kernel = "Bisquare";
  ok.adjusted_r2 = 0.93512;
  ok.aicc = 1234.5678;
  ok.oos_rmse = 1.23456;
  ok.oos_r2 = 0.8682;
  ok.moran_p = 0.004;
  ComparisonRow bad;
  bad.algorithm = "GWR";
  bad.fixed_adaptive = "Adaptive";
  bad.kernel = "Gaussian";
  bad.error = "fold 1: singular, with comma";

  sdm::testing::TempDir dir("report");
  write_table_csv(dir / "t.csv", {ok, bad}, TableLayout::gwr_settings);
  std::ifstream in(dir / "t.csv");
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(header,
            "Algorithm,Fixed/Adaptive,Bandwidth Selection,Kernel,Adjusted R²,AICc,Out-of-Sample RMSE,"
            "Out-of-Sample R²,Residual Moran's I P-Value");
  EXPECT_EQ(first, "GWR,Fixed,AICc,Bisquare,0.935,1234.57,1.2346,0.8682,0.004");
  EXPECT_NE(second.find("\"failed: fold 1: singular, with comma\""), std::string::npos) << second;

  const std::string text = format_table_text({ok, bad}, TableLayout::models);
  std::istringstream lines(text);
  std::string l1, l2, l3, note;
  std::getline(lines, l1);
  std::getline(lines, l2);
  std::getline(lines, l3);
  std::getline(lines, note);
  EXPECT_EQ(l1.rfind("Algorithm", 0), 0u);
  EXPECT_NE(l3.find("failed"), std::string::npos);
  EXPECT_EQ(l3.find("singular"), std::string::npos);
  EXPECT_NE(note.find("GWR: fold 1: singular, with comma"), std::string::npos);
  // Columns line up: "Fixed/Adaptive" starts where "Fixed" does.
  EXPECT_EQ(l1.find("Fixed/Adaptive"), l2.find("Fixed"));
}
