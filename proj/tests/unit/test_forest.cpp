#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <string>

#include "sdm/error.hpp"
#include "sdm/forest/forest.hpp"
#include "sdm/forest/grf.hpp"
#include "sdm/forest/serialize.hpp"
#include "sdm/forest/shap.hpp"
#include "sdm/forest/tree.hpp"
#include "sdm/linear/ols.hpp"
#include "shap_oracle.hpp"
#include "test_support.hpp"

using namespace sdm;
using namespace sdm::forest;
using sdm::testing::brute_force_shap;
using sdm::testing::make_table;
using sdm::testing::random_matrix;
using sdm::testing::random_points;

namespace {

std::vector<std::string> names_for(std::size_t p) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < p; ++j) out.push_back("x" + std::to_string(j + 1));
  return out;
}

Tree leaf_tree(double value, double cover = 1.0) {
  Tree t;
  TreeNode leaf;
  leaf.value = value;
  leaf.cover = cover;
  leaf.n_samples = 1;
  t.nodes.push_back(leaf);
  return t;
}

// Root split on `feature` at `threshold` into two leaves.
Tree stump(int feature, double threshold, double left, double right, double cover_l, double cover_r) {
  Tree t;
  TreeNode root;
  root.feature = feature;
  root.threshold = threshold;
  root.left = 1;
  root.right = 2;
  root.cover = cover_l + cover_r;
  root.value = (left * cover_l + right * cover_r) / root.cover;
  t.nodes.push_back(root);
  TreeNode l, r;
  l.value = left;
  l.cover = cover_l;
  r.value = right;
  r.cover = cover_r;
  t.nodes.push_back(l);
  t.nodes.push_back(r);
  return t;
}

ForestModel forest_of(std::vector<Tree> trees, std::size_t p) {
  ForestModel m;
  m.trees = std::move(trees);
  m.params.n_trees = m.trees.size();
  m.params.mtry = p;
  m.feature_names = names_for(p);
  return m;
}

}  // namespace

TEST(Forest, SingleUnprunedTreeInterpolatesDistinctRows) {
  const Eigen::MatrixXd X = random_matrix(80, 3, 1);
  const Eigen::VectorXd y = random_matrix(80, 1, 2).col(0);
  ForestParams params;
  params.n_trees = 1;
  params.bootstrap = false;
  params.mtry = 3;
  params.min_leaf = 1;
  const auto m = rf_fit(X, y, names_for(3), params, 3);
  const Eigen::VectorXd pred = rf_predict(m, X);
  for (Eigen::Index i = 0; i < 80; ++i) EXPECT_EQ(pred(i), y(i));
}

TEST(Forest, DeterministicAcrossRunsAndWorkerCounts) {
  const Eigen::MatrixXd X = random_matrix(150, 4, 4);
  const Eigen::VectorXd y = X.col(0).array().square() + X.col(1).array();
  ForestParams params;
  params.n_trees = 40;
  const auto a = rf_fit(X, y, names_for(4), params, 77, 1);
  const auto b = rf_fit(X, y, names_for(4), params, 77, 4);
  const auto c = rf_fit(X, y, names_for(4), params, 77);
  ASSERT_EQ(a.trees.size(), 40u);
  for (std::size_t t = 0; t < 40; ++t) {
    EXPECT_TRUE(a.trees[t] == b.trees[t]) << "tree " << t;
    EXPECT_TRUE(a.trees[t] == c.trees[t]) << "tree " << t;
  }
  const Eigen::MatrixXd probe = random_matrix(50, 4, 5);
  EXPECT_EQ(rf_predict(a, probe), rf_predict(c, probe));
  const auto d = rf_fit(X, y, names_for(4), params, 78);
  EXPECT_NE(rf_predict(a, probe), rf_predict(d, probe));
}

TEST(Forest, StepTargetBeatsOlsOutOfSample) {
  const Eigen::MatrixXd X = random_matrix(500, 2, 6);
  const Eigen::VectorXd e = random_matrix(500, 1, 7).col(0);
  Eigen::VectorXd y(500);
  for (Eigen::Index i = 0; i < 500; ++i) y(i) = (X(i, 0) > 0 ? 1.0 : 0.0) + 0.05 * e(i);
  const Eigen::MatrixXd Xtr = X.topRows(250), Xte = X.bottomRows(250);
  const Eigen::VectorXd ytr = y.head(250), yte = y.tail(250);
  ForestParams params;
  params.n_trees = 100;
  const auto rf = rf_fit(Xtr, ytr, names_for(2), params, 8);
  const auto ols = linear::ols_fit(Xtr, ytr, names_for(2));
  const double rf_mse = (rf_predict(rf, Xte) - yte).squaredNorm() / 250.0;
  const double ols_mse = (ols.predict(Xte) - yte).squaredNorm() / 250.0;
  EXPECT_LT(rf_mse, ols_mse);
}

TEST(Forest, PredictionsStayWithinTrainingRange) {
  const Eigen::MatrixXd X = random_matrix(200, 3, 9);
  const Eigen::VectorXd y = 3.0 * X.col(0) + X.col(2).array().cube().matrix();
  ForestParams params;
  params.n_trees = 60;
  const auto m = rf_fit(X, y, names_for(3), params, 10);
  const Eigen::VectorXd pred = rf_predict(m, 20.0 * random_matrix(1000, 3, 11));
  EXPECT_GE(pred.minCoeff(), y.minCoeff());
  EXPECT_LE(pred.maxCoeff(), y.maxCoeff());
}

TEST(Forest, LeafValuesAreTrainingMeansAndSplitsSendLowerLeft) {
  const Eigen::MatrixXd X = random_matrix(120, 3, 12);
  const Eigen::VectorXd y = X.col(1) + 0.3 * random_matrix(120, 1, 13).col(0);
  ForestParams params;
  params.n_trees = 1;
  params.bootstrap = false;
  params.min_leaf = 4;
  const auto m = rf_fit(X, y, names_for(3), params, 14);
  const Tree& tree = m.trees[0];
  std::vector<double> sum(tree.nodes.size(), 0.0);
  std::vector<double> count(tree.nodes.size(), 0.0);
  for (Eigen::Index i = 0; i < 120; ++i) {
    const auto leaf = tree.leaf_of(X.row(i));
    sum[leaf] += y(i);
    count[leaf] += 1;
  }
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    const auto& nd = tree.nodes[k];
    if (!nd.is_leaf()) continue;
    ASSERT_GT(count[k], 0);
    EXPECT_GE(count[k], 4);
    EXPECT_NEAR(nd.value, sum[k] / count[k], 1e-12);
    EXPECT_DOUBLE_EQ(nd.cover, count[k]);
  }
  // Manual descent agrees with leaf_of.
  for (Eigen::Index i = 0; i < 10; ++i) {
    int node = 0;
    while (!tree.nodes[static_cast<std::size_t>(node)].is_leaf()) {
      const auto& nd = tree.nodes[static_cast<std::size_t>(node)];
      node = X(i, nd.feature) <= nd.threshold ? nd.left : nd.right;
    }
    EXPECT_EQ(static_cast<std::size_t>(node), tree.leaf_of(X.row(i)));
  }
}

TEST(Forest, ConstantTargetGivesSingleLeavesAndWarning) {
  const Eigen::MatrixXd X = random_matrix(30, 2, 15);
  const auto m = rf_fit(X, Eigen::VectorXd::Constant(30, 4.5), names_for(2), ForestParams{}, 16);
  EXPECT_FALSE(m.warnings.empty());
  for (const auto& t : m.trees) EXPECT_EQ(t.nodes.size(), 1u);
  EXPECT_DOUBLE_EQ(rf_predict(m, random_matrix(5, 2, 17))(3), 4.5);
}

TEST(Forest, IdenticalLeafTreesPredictTheirValue) {
  const auto m = forest_of({leaf_tree(2.25), leaf_tree(2.25), leaf_tree(2.25)}, 2);
  const Eigen::VectorXd pred = rf_predict(m, random_matrix(20, 2, 18));
  for (Eigen::Index i = 0; i < 20; ++i) EXPECT_EQ(pred(i), 2.25);
}

TEST(Forest, ToyForestMatchesManualTraversal) {
  Tree deep;
  // x1 <= 0 ? (x2 <= 1 ? 1 : 2) : 5
  deep.nodes.resize(5);
  deep.nodes[0] = {0, 0.0, 1, 4, 0.0, 10, 10.0};
  deep.nodes[1] = {1, 1.0, 2, 3, 0.0, 6, 6.0};
  deep.nodes[2] = {-1, 0.0, -1, -1, 1.0, 3, 3.0};
  deep.nodes[3] = {-1, 0.0, -1, -1, 2.0, 3, 3.0};
  deep.nodes[4] = {-1, 0.0, -1, -1, 5.0, 4, 4.0};
  const auto m = forest_of({deep, stump(1, -0.5, -3.0, 3.0, 5, 5), stump(0, 2.0, 0.5, 9.0, 8, 2)}, 2);
  Eigen::MatrixXd X(4, 2);
  X << -1, 0, -1, 2, 1, -1, 3, 3;
  const double expected[] = {(1 + 3 + 0.5) / 3.0, (2 + 3 + 0.5) / 3.0, (5 - 3 + 0.5) / 3.0,
                             (5 + 3 + 9) / 3.0};
  const Eigen::VectorXd pred = rf_predict(m, X);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(pred(i), expected[i], 1e-15);
}

TEST(Forest, AddingConstantTreeMovesPredictionByExactShare) {
  const Eigen::MatrixXd X = random_matrix(100, 2, 19);
  ForestParams params;
  params.n_trees = 9;
  auto m = rf_fit(X, X.col(0) + X.col(1), names_for(2), params, 20);
  const Eigen::MatrixXd probe = random_matrix(25, 2, 21);
  const Eigen::VectorXd before = rf_predict(m, probe);
  m.trees.push_back(leaf_tree(7.0));
  m.params.n_trees = 10;
  const Eigen::VectorXd after = rf_predict(m, probe);
  for (Eigen::Index i = 0; i < 25; ++i) EXPECT_NEAR(after(i), before(i) + (7.0 - before(i)) / 10.0, 1e-12);
}

TEST(Forest, SchemaChecks) {
  const auto t = make_table(random_points(40, 1000, 22), random_matrix(40, 3, 23), random_matrix(40, 1, 24).col(0));
  ForestParams params;
  params.n_trees = 5;
  const auto m = rf_fit(t, params, 25);
  EXPECT_THROW(rf_predict(m, random_matrix(3, 2, 26)), Error);
  auto renamed = t;
  renamed.columns[1].name = "other";
  EXPECT_THROW(rf_predict(m, renamed), Error);
  // Columns are matched by name, not position.
  const auto swapped = t.select_columns({"x3", "x1", "x2"});
  EXPECT_EQ(rf_predict(m, swapped), rf_predict(m, t));

  ForestParams bad;
  bad.mtry = 4;
  EXPECT_THROW(rf_fit(t, bad, 1), Error);
  bad = {};
  bad.n_trees = 0;
  EXPECT_THROW(rf_fit(t, bad, 1), Error);
  bad = {};
  bad.min_leaf = 0;
  EXPECT_THROW(rf_fit(t, bad, 1), Error);
  EXPECT_EQ(ForestParams{}.resolved_mtry(7), 3u);
  EXPECT_EQ(ForestParams{}.resolved_mtry(6), 2u);
}

TEST(Forest, CoordinateFeaturesAppended) {
  const auto t = make_table(random_points(60, 5000, 27), random_matrix(60, 2, 28), random_matrix(60, 1, 29).col(0));
  ForestParams params;
  params.n_trees = 5;
  const auto m = rf_fit(t, params, 30, true);
  EXPECT_TRUE(m.uses_coordinates);
  ASSERT_EQ(m.features(), 4u);
  EXPECT_EQ(m.feature_names[2], "coord_x");
  EXPECT_EQ(m.feature_names[3], "coord_y");
  const Eigen::MatrixXd design = model_design(m, t);
  EXPECT_EQ(design(5, 2), t.locations[5].x);
  EXPECT_EQ(rf_predict(m, t), rf_predict(m, design));
}

TEST(Grf, FullNeighbourhoodReproducesGlobalForest) {
  const auto t = make_table(random_points(50, 5000, 31), random_matrix(50, 2, 32), random_matrix(50, 1, 33).col(0));
  ForestParams params;
  params.n_trees = 20;
  const auto global = rf_fit(t, params, 34);
  const auto grf = grf_fit(t, 50, params, 34);
  ASSERT_EQ(grf.local.size(), 50u);
  const Eigen::VectorXd g = rf_predict(global, t);
  const Eigen::VectorXd l = grf_predict(grf, t);
  for (Eigen::Index i = 0; i < 50; ++i) EXPECT_EQ(g(i), l(i));
  // Same feature vector, different stations: identical output.
  const Eigen::RowVectorXd x = random_matrix(1, 2, 35).row(0);
  const double first = grf_predict(grf, t.locations[0], x);
  for (std::size_t s = 1; s < 50; ++s) EXPECT_EQ(grf_predict(grf, t.locations[s], x), first);
}

TEST(Grf, EveryLocalModelSeesExactlyKNearest) {
  const auto t = make_table(random_points(40, 5000, 36), random_matrix(40, 2, 37), random_matrix(40, 1, 38).col(0));
  ForestParams params;
  params.n_trees = 3;
  const auto grf = grf_fit(t, 10, params, 39);
  for (std::size_t i = 0; i < 40; ++i) {
    const auto& nb = grf.neighbourhoods[i];
    ASSERT_EQ(nb.size(), 10u);
    EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
    EXPECT_NE(std::find(nb.begin(), nb.end(), i), nb.end());
    // Every excluded station is at least as far as every included one.
    double worst_in = 0;
    for (auto j : nb) worst_in = std::max(worst_in, spatial::distance(t.locations[i], t.locations[j]));
    for (std::size_t j = 0; j < 40; ++j) {
      if (std::find(nb.begin(), nb.end(), j) == nb.end()) {
        EXPECT_GE(spatial::distance(t.locations[i], t.locations[j]), worst_in);
      }
    }
  }
  EXPECT_THROW(grf_fit(t, 41, params, 1), Error);
  EXPECT_THROW(grf_fit(t, 3, params, 1), Error);
  EXPECT_EQ(default_grf_k(400, 3), 100u);
  EXPECT_EQ(default_grf_k(10, 6), 8u);
  EXPECT_EQ(default_grf_k(5, 6), 5u);
}

TEST(Grf, DispatchMatchesExhaustiveScan) {
  const auto t = make_table(random_points(70, 5000, 40), random_matrix(70, 2, 41), random_matrix(70, 1, 42).col(0));
  ForestParams params;
  params.n_trees = 3;
  const auto grf = grf_fit(t, 20, params, 43);
  const auto queries = random_points(500, 5000, 44);
  for (const auto& q : queries) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < 70; ++s) {
      if (spatial::distance(q, t.locations[s]) < spatial::distance(q, t.locations[best])) best = s;
    }
    ASSERT_EQ(grf.dispatch(q), best);
  }
  const Eigen::RowVectorXd x = t.X.row(3);
  EXPECT_EQ(grf_predict(grf, t.locations[12], x), grf.local[12].predict_row(x));
  const spatial::Point near12{t.locations[12].x + 0.01, t.locations[12].y};
  EXPECT_EQ(grf_predict(grf, near12, x), grf.local[12].predict_row(x));
}

TEST(Grf, LocalModelsWinOnTheRareRegime) {
  // West: y = 3 x1 on 300 stations. East: y = -3 x1 on 60 stations.
  const std::size_t nw = 300, ne = 60;
  std::mt19937_64 rng(45);
  std::normal_distribution<double> g;
  std::vector<spatial::Point> pts;
  Eigen::MatrixXd X(nw + ne, 2);
  Eigen::VectorXd y(nw + ne);
  for (std::size_t i = 0; i < nw + ne; ++i) {
    const bool east = i >= nw;
    pts.push_back({(east ? 100'000.0 : 0.0) + 5'000.0 * g(rng), 5'000.0 * g(rng)});
    const auto r = static_cast<Eigen::Index>(i);
    X(r, 0) = g(rng);
    X(r, 1) = g(rng);
    y(r) = (east ? -3.0 : 3.0) * X(r, 0) + 0.1 * g(rng);
  }
  const auto t = make_table(pts, X, y);
  std::vector<std::size_t> train, test_east;
  for (std::size_t i = 0; i < nw + ne; ++i) {
    if (i >= nw && i % 4 == 0) {
      test_east.push_back(i);
    } else {
      train.push_back(i);
    }
  }
  const auto tr = t.select_rows(train);
  const auto te = t.select_rows(test_east);
  ForestParams params;
  params.n_trees = 100;
  const auto rf = rf_fit(tr, params, 46);
  const auto grf = grf_fit(tr, 30, params, 46);
  const double rf_mse = (rf_predict(rf, te) - te.y).squaredNorm();
  const double grf_mse = (grf_predict(grf, te) - te.y).squaredNorm();
  EXPECT_LT(grf_mse, rf_mse);
}

TEST(Shap, StumpOnOneFeature) {
  const auto m = forest_of({stump(2, 0.5, -1.0, 4.0, 30, 10)}, 4);
  Eigen::RowVectorXd x(4);
  x << 9, -9, 1.0, 3;
  const auto s = tree_shap(m, x);
  EXPECT_NEAR(s.base_value, (-30.0 + 40.0) / 40.0, 1e-15);
  for (int j : {0, 1, 3}) EXPECT_EQ(s.phi(j), 0.0);
  EXPECT_NEAR(s.phi(2), 4.0 - s.base_value, 1e-12);
}

TEST(Shap, MatchesSubsetEnumerationOnRandomForests) {
  std::mt19937_64 rng(47);
  for (int f = 0; f < 12; ++f) {
    const std::size_t p = 2 + rng() % 5;
    const auto n = static_cast<Eigen::Index>(40 + rng() % 60);
    const Eigen::MatrixXd X = random_matrix(n, static_cast<Eigen::Index>(p), 100 + f);
    Eigen::VectorXd y = random_matrix(n, 1, 200 + f).col(0);
    y += X.col(0).array().sin().matrix() * 2.0;
    ForestParams params;
    params.n_trees = 1 + rng() % 5;
    params.max_depth = 1 + rng() % 3;
    params.min_leaf = 1;
    params.mtry = 1 + rng() % p;
    const auto m = rf_fit(X, y, names_for(p), params, 300 + f);
    const Eigen::MatrixXd probes = random_matrix(8, static_cast<Eigen::Index>(p), 400 + f);
    for (Eigen::Index r = 0; r < probes.rows(); ++r) {
      const auto s = tree_shap(m, probes.row(r));
      const Eigen::VectorXd oracle = brute_force_shap(m, probes.row(r));
      for (std::size_t j = 0; j < p; ++j) {
        EXPECT_NEAR(s.phi(static_cast<Eigen::Index>(j)), oracle(static_cast<Eigen::Index>(j)), 1e-9)
            << "forest " << f << " feature " << j;
      }
      EXPECT_NEAR(s.base_value + s.phi.sum(), m.predict_row(probes.row(r)), 1e-9);
    }
  }
}

TEST(Shap, LocalAccuracyOnLargeForest) {
  const Eigen::MatrixXd X = random_matrix(300, 8, 48);
  const Eigen::VectorXd y = X.col(0) * 2 + X.col(1).cwiseProduct(X.col(2)) + 0.1 * random_matrix(300, 1, 49).col(0);
  ForestParams params;
  params.n_trees = 50;
  const auto m = rf_fit(X, y, names_for(8), params, 50);
  const Eigen::MatrixXd probes = random_matrix(40, 8, 51);
  for (Eigen::Index r = 0; r < 40; ++r) {
    const auto s = tree_shap(m, probes.row(r));
    EXPECT_NEAR(s.base_value + s.phi.sum(), m.predict_row(probes.row(r)), 1e-9);
  }
}

TEST(Shap, UnusedFeatureIsExactlyZero) {
  Eigen::MatrixXd X = random_matrix(120, 3, 52);
  X.col(1).setConstant(4.0);  // no distinct values, so never split on
  const Eigen::VectorXd y = X.col(0) + X.col(2);
  ForestParams params;
  params.n_trees = 20;
  params.mtry = 3;
  const auto m = rf_fit(X, y, names_for(3), params, 53);
  for (Eigen::Index r = 0; r < 10; ++r) EXPECT_EQ(tree_shap(m, X.row(r)).phi(1), 0.0);
}

TEST(Shap, ExchangeableFeaturesShareAttribution) {
  // Two mirrored trees: swapping the roles of features 0 and 1 maps the
  // forest onto itself, so equal inputs get equal attributions.
  auto build = [](int a, int b) {
    Tree t;
    t.nodes.resize(7);
    t.nodes[0] = {a, 0.0, 1, 2, 0.0, 0, 20.0};
    t.nodes[1] = {b, 0.0, 3, 4, 0.0, 0, 12.0};
    t.nodes[2] = {b, 0.0, 5, 6, 0.0, 0, 8.0};
    t.nodes[3] = {-1, 0.0, -1, -1, 1.0, 0, 7.0};
    t.nodes[4] = {-1, 0.0, -1, -1, 3.0, 0, 5.0};
    t.nodes[5] = {-1, 0.0, -1, -1, 3.0, 0, 5.0};
    t.nodes[6] = {-1, 0.0, -1, -1, 8.0, 0, 3.0};
    return t;
  };
  const auto m = forest_of({build(0, 1), build(1, 0)}, 3);
  for (double v : {-1.0, 1.0}) {
    Eigen::RowVectorXd x(3);
    x << v, v, 0.3;
    const auto s = tree_shap(m, x);
    EXPECT_NEAR(s.phi(0), s.phi(1), 1e-12);
    EXPECT_EQ(s.phi(2), 0.0);
  }
}

TEST(Shap, DuplicatedColumnIsNeverSplitOnWithFullMtry) {
  Eigen::MatrixXd X = random_matrix(150, 3, 54);
  X.col(2) = X.col(0);
  const Eigen::VectorXd y = 2 * X.col(0) + X.col(1);
  ForestParams params;
  params.n_trees = 10;
  params.mtry = 3;
  const auto m = rf_fit(X, y, names_for(3), params, 55);
  for (const auto& t : m.trees) {
    for (const auto& nd : t.nodes) EXPECT_NE(nd.feature, 2);
  }
}

TEST(Shap, IndependentFeatureHasLowImportance) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Eigen::MatrixXd X = random_matrix(300, 3, 600 + seed);
    const Eigen::VectorXd y = 2 * X.col(0) + X.col(1) + 0.1 * random_matrix(300, 1, 700 + seed).col(0);
    const auto t = make_table(random_points(300, 5000, 800 + seed), X, y);
    ForestParams params;
    params.n_trees = 50;
    params.mtry = 3;  // with mtry 1 every third split is forced onto x3
    const auto m = rf_fit(t, params, seed);
    const auto summary = shap_summary(m, t);
    EXPECT_EQ(summary.ranking.front(), 0u);
    EXPECT_LT(summary.importance(2), 0.05 * summary.importance(0)) << "seed " << seed;
  }
}

TEST(Shap, SummaryExports) {
  const auto t = make_table(random_points(30, 5000, 56), random_matrix(30, 1, 57), random_matrix(30, 1, 58).col(0));
  ForestParams params;
  params.n_trees = 10;
  const auto m = rf_fit(t, params, 59);
  const auto summary = shap_summary(m, t);
  ASSERT_EQ(summary.importance.size(), 1);
  EXPECT_GT(summary.importance(0), 0.0);
  EXPECT_EQ(summary.phi.rows(), 30);

  sdm::testing::TempDir dir("shap");
  write_shap_importance(dir / "imp.csv", summary);
  write_shap_beeswarm(dir / "bee.csv", summary);
  std::ifstream imp(dir / "imp.csv");
  std::string line;
  std::getline(imp, line);
  EXPECT_EQ(line, "rank,feature,mean_abs_shap,share");
  std::getline(imp, line);
  EXPECT_EQ(line.substr(0, 5), "1,x1,");
  EXPECT_EQ(line.substr(line.rfind(',') + 1), "1");
  std::ifstream bee(dir / "bee.csv");
  std::getline(bee, line);
  EXPECT_EQ(line, "station_id,feature,value,shap");
  std::size_t rows = 0;
  while (std::getline(bee, line)) ++rows;
  EXPECT_EQ(rows, 30u);
}

TEST(Serialization, ForestRoundTripIsBitExact) {
  const Eigen::MatrixXd X = random_matrix(100, 3, 60);
  const Eigen::VectorXd y = X.col(0).array().exp();
  ForestParams params;
  params.n_trees = 15;
  auto m = rf_fit(X, y, names_for(3), params, 61);
  m.uses_coordinates = false;
  const auto j = to_json(m);
  const auto back = forest_from_json(nlohmann::json::parse(j.dump()));
  ASSERT_EQ(back.trees.size(), m.trees.size());
  for (std::size_t t = 0; t < m.trees.size(); ++t) EXPECT_TRUE(back.trees[t] == m.trees[t]);
  EXPECT_TRUE(back.params == m.params);
  EXPECT_EQ(back.seed, 61u);
  EXPECT_EQ(back.base_value, m.base_value);
  EXPECT_EQ(to_json(back).dump(), j.dump());
  const Eigen::MatrixXd probe = random_matrix(30, 3, 62);
  EXPECT_EQ(rf_predict(back, probe), rf_predict(m, probe));

  auto wrong = j;
  wrong["format_version"] = 99;
  EXPECT_THROW(forest_from_json(wrong), Error);
}

TEST(Serialization, GrfRoundTrip) {
  const auto t = make_table(random_points(40, 5000, 63), random_matrix(40, 2, 64), random_matrix(40, 1, 65).col(0));
  ForestParams params;
  params.n_trees = 4;
  const auto g = grf_fit(t, 12, params, 66);
  const auto back = grf_from_json(nlohmann::json::parse(to_json(g).dump()));
  EXPECT_EQ(grf_predict(back, t), grf_predict(g, t));
  EXPECT_EQ(back.k, 12u);
  EXPECT_EQ(back.neighbourhoods, g.neighbourhoods);
  EXPECT_EQ(back.dispatch({2500, 2500}), g.dispatch({2500, 2500}));
}
