#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace sdm::forest {

/// Flat regression-tree node. Split nodes send rows with x[feature] <= threshold
/// to `left`. Leaves have feature == -1 and hold the mean training target.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  std::uint32_t n_samples = 0;
  double cover = 0.0;  // training rows (with bootstrap multiplicity) reaching the node

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  /// Index of the leaf reached by x.
  std::size_t leaf_of(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  /// Cover-weighted mean of leaf values.
  double expected_value() const;
  std::size_t depth() const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

struct TreeParams {
  std::size_t mtry = 1;
  std::size_t min_leaf = 5;
  std::size_t max_depth = 0;  // 0 = unlimited
};

/// CART regression tree on the rows listed in `sample` (repeats allowed).
/// Splits maximise the variance reduction over mtry features drawn without
/// replacement at each node; thresholds are midpoints between consecutive
/// distinct values; equal gains go to the lowest feature, then threshold.
Tree grow_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               std::vector<std::size_t> sample, const TreeParams& params, std::mt19937_64& rng);

}  // namespace sdm::forest
