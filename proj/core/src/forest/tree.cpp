#include "sdm/forest/tree.hpp"

#include <algorithm>
#include <numeric>

namespace sdm::forest {

std::size_t Tree::leaf_of(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  std::size_t at = 0;
  while (!nodes[at].is_leaf()) {
    const TreeNode& n = nodes[at];
    at = static_cast<std::size_t>(x(n.feature) <= n.threshold ? n.left : n.right);
  }
  return at;
}

double Tree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  return nodes[leaf_of(x)].value;
}

double Tree::expected_value() const {
  double total = 0.0;
  double cover = 0.0;
  for (const auto& n : nodes) {
    if (!n.is_leaf()) continue;
    total += n.cover * n.value;
    cover += n.cover;
  }
  return cover > 0 ? total / cover : 0.0;
}

std::size_t Tree::depth() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

namespace {

struct Grower {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& y;
  const TreeParams& params;
  std::mt19937_64& rng;
  Tree tree;
  std::vector<std::size_t> features;
  std::vector<std::pair<double, std::size_t>> scratch;

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  Split best_split(const std::vector<std::size_t>& rows, double sum) {
    const std::size_t p = static_cast<std::size_t>(X.cols());
    const std::size_t m = rows.size();
    // Partial Fisher-Yates draw of mtry features, then ascending order so
    // ties resolve to the lowest index.
    for (std::size_t k = 0; k < params.mtry; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng() % (p - k));
      std::swap(features[k], features[j]);
    }
    std::vector<std::size_t> candidates(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(params.mtry));
    std::sort(candidates.begin(), candidates.end());

    Split best;
    const double dm = static_cast<double>(m);
    for (std::size_t f : candidates) {
      scratch.clear();
      for (std::size_t r : rows) scratch.emplace_back(X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)), r);
      std::sort(scratch.begin(), scratch.end());
      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < m; ++i) {
        left_sum += y(static_cast<Eigen::Index>(scratch[i].second));
        const std::size_t nl = i + 1;
        const std::size_t nr = m - nl;
        if (scratch[i].first == scratch[i + 1].first) continue;
        if (nl < params.min_leaf || nr < params.min_leaf) continue;
        const double ml = left_sum / static_cast<double>(nl);
        const double mr = (sum - left_sum) / static_cast<double>(nr);
        const double gain = static_cast<double>(nl) * static_cast<double>(nr) / dm * (ml - mr) * (ml - mr);
        if (gain > best.gain) {
          best.gain = gain;
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (scratch[i].first + scratch[i + 1].first);
          // Midpoint may round onto the upper value for adjacent doubles.
          if (best.threshold >= scratch[i + 1].first) best.threshold = scratch[i].first;
        }
      }
    }
    return best;
  }

  int grow(std::vector<std::size_t>& rows, std::size_t depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double sum = 0.0;
    double lo = y(static_cast<Eigen::Index>(rows.front()));
    double hi = lo;
    for (std::size_t r : rows) {
      const double v = y(static_cast<Eigen::Index>(r));
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    {
      TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
      node.value = sum / static_cast<double>(rows.size());
      node.n_samples = static_cast<std::uint32_t>(rows.size());
      node.cover = static_cast<double>(rows.size());
    }
    const bool depth_ok = params.max_depth == 0 || depth < params.max_depth;
    if (!depth_ok || lo == hi || rows.size() < 2 * params.min_leaf) return id;

    const Split split = best_split(rows, sum);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) {
      (X(static_cast<Eigen::Index>(r), split.feature) <= split.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }
};

}  // namespace

Tree grow_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<std::size_t> sample,
               const TreeParams& params, std::mt19937_64& rng) {
  Grower g{X, y, params, rng, {}, {}, {}};
  g.features.resize(static_cast<std::size_t>(X.cols()));
  std::iota(g.features.begin(), g.features.end(), std::size_t{0});
  // Row order inside a node must not depend on how the sample was drawn.
  std::sort(sample.begin(), sample.end());
  g.grow(sample, 0);
  return std::move(g.tree);
}

}  // namespace sdm::forest
