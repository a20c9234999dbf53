#include "sdm/forest/shap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "sdm/error.hpp"
#include "sdm/parallel.hpp"

namespace sdm::forest {

namespace {

// Path bookkeeping of the polynomial-time TreeSHAP recursion: each element
// records the fraction of "feature absent" (zero) and "feature present" (one)
// paths flowing through a split on that feature, and pweight holds the
// permutation weights of all subsets of the path.
struct PathElement {
  int feature = -1;
  double zero_fraction = 0.0;
  double one_fraction = 0.0;
  double pweight = 0.0;
};

void extend_path(PathElement* path, std::size_t depth, double zero_fraction, double one_fraction,
                 int feature) {
  path[depth] = {feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0};
  const double d1 = static_cast<double>(depth + 1);
  for (std::size_t i = depth; i-- > 0;) {
    path[i + 1].pweight += one_fraction * path[i].pweight * static_cast<double>(i + 1) / d1;
    path[i].pweight = zero_fraction * path[i].pweight * static_cast<double>(depth - i) / d1;
  }
}

void unwind_path(PathElement* path, std::size_t depth, std::size_t index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  const double d1 = static_cast<double>(depth + 1);
  double next = path[depth].pweight;
  for (std::size_t i = depth; i-- > 0;) {
    if (one != 0.0) {
      const double tmp = path[i].pweight;
      path[i].pweight = next * d1 / (static_cast<double>(i + 1) * one);
      next = tmp - path[i].pweight * zero * static_cast<double>(depth - i) / d1;
    } else {
      path[i].pweight = path[i].pweight * d1 / (zero * static_cast<double>(depth - i));
    }
  }
  for (std::size_t i = index; i < depth; ++i) {
    path[i].feature = path[i + 1].feature;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

double unwound_sum(const PathElement* path, std::size_t depth, std::size_t index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  const double d1 = static_cast<double>(depth + 1);
  double next = path[depth].pweight;
  double total = 0.0;
  for (std::size_t i = depth; i-- > 0;) {
    if (one != 0.0) {
      const double tmp = next * d1 / (static_cast<double>(i + 1) * one);
      total += tmp;
      next = path[i].pweight - tmp * zero * static_cast<double>(depth - i) / d1;
    } else if (zero != 0.0) {
      total += path[i].pweight / zero / (static_cast<double>(depth - i) / d1);
    }
  }
  return total;
}

struct Recursion {
  const Tree& tree;
  const Eigen::Ref<const Eigen::RowVectorXd>& x;
  Eigen::VectorXd& phi;

  void run(std::size_t node, std::size_t depth, PathElement* parent, double zero_fraction,
           double one_fraction, int feature) {
    PathElement* path = parent + depth + 1;
    std::copy(parent, parent + depth + 1, path);
    extend_path(path, depth, zero_fraction, one_fraction, feature);

    const TreeNode& n = tree.nodes[node];
    if (n.is_leaf()) {
      for (std::size_t i = 1; i <= depth; ++i) {
        const double w = unwound_sum(path, depth, i);
        phi(path[i].feature) += w * (path[i].one_fraction - path[i].zero_fraction) * n.value;
      }
      return;
    }

    const std::size_t hot = static_cast<std::size_t>(x(n.feature) <= n.threshold ? n.left : n.right);
    const std::size_t cold = static_cast<std::size_t>(hot == static_cast<std::size_t>(n.left) ? n.right : n.left);
    const double hot_zero = tree.nodes[hot].cover / n.cover;
    const double cold_zero = tree.nodes[cold].cover / n.cover;
    double incoming_zero = 1.0;
    double incoming_one = 1.0;

    // A feature already on the path is undone first so it appears once.
    std::size_t k = 0;
    for (; k <= depth; ++k) {
      if (path[k].feature == n.feature) break;
    }
    if (k != depth + 1) {
      incoming_zero = path[k].zero_fraction;
      incoming_one = path[k].one_fraction;
      unwind_path(path, depth, k);
      --depth;
    }
    run(hot, depth + 1, path, hot_zero * incoming_zero, incoming_one, n.feature);
    run(cold, depth + 1, path, cold_zero * incoming_zero, 0.0, n.feature);
  }
};

}  // namespace

ShapValues tree_shap(const Tree& tree, std::size_t p, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  require(static_cast<std::size_t>(x.size()) == p, ErrorCode::schema_mismatch,
          "SHAP input has the wrong number of features");
  ShapValues out;
  out.phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  out.base_value = tree.expected_value();
  const std::size_t d = tree.depth() + 2;
  std::vector<PathElement> buffer(d * (d + 1) / 2 + d);
  Recursion rec{tree, x, out.phi};
  rec.run(0, 0, buffer.data(), 1.0, 1.0, -1);
  return out;
}

ShapValues tree_shap(const ForestModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  require(!model.trees.empty(), ErrorCode::unfitted_model, "forest has no trees");
  const std::size_t p = model.features();
  ShapValues out;
  out.phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  for (const auto& tree : model.trees) {
    const ShapValues t = tree_shap(tree, p, x);
    out.phi += t.phi;
    out.base_value += t.base_value;
  }
  const double m = static_cast<double>(model.trees.size());
  out.phi /= m;
  out.base_value /= m;
  return out;
}

ShapSummary shap_summary(const ForestModel& model, const data::FeatureTable& table) {
  ShapSummary s;
  s.names = model.feature_names;
  s.values = model_design(model, table);
  s.row_ids = table.station_ids;
  const Eigen::Index n = s.values.rows();
  const Eigen::Index p = s.values.cols();
  s.phi.resize(n, p);
  s.base_values.resize(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    const ShapValues v = tree_shap(model, s.values.row(r));
    s.phi.row(r) = v.phi.transpose();
    s.base_values(r) = v.base_value;
  });
  s.importance = n > 0 ? Eigen::VectorXd(s.phi.cwiseAbs().colwise().mean().transpose())
                       : Eigen::VectorXd::Zero(p);
  s.ranking.resize(static_cast<std::size_t>(p));
  std::iota(s.ranking.begin(), s.ranking.end(), std::size_t{0});
  std::stable_sort(s.ranking.begin(), s.ranking.end(), [&](std::size_t a, std::size_t b) {
    return s.importance(static_cast<Eigen::Index>(a)) > s.importance(static_cast<Eigen::Index>(b));
  });
  return s;
}

void write_shap_importance(const std::filesystem::path& path, const ShapSummary& summary) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::io, "cannot write " + path.string());
  out.precision(17);
  const double total = summary.importance.sum();
  out << "rank,feature,mean_abs_shap,share\n";
  for (std::size_t r = 0; r < summary.ranking.size(); ++r) {
    const std::size_t j = summary.ranking[r];
    const double v = summary.importance(static_cast<Eigen::Index>(j));
    out << r + 1 << ',' << summary.names[j] << ',' << v << ',' << (total > 0 ? v / total : 0.0) << '\n';
  }
}

void write_shap_beeswarm(const std::filesystem::path& path, const ShapSummary& summary) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::io, "cannot write " + path.string());
  out.precision(17);
  out << "station_id,feature,value,shap\n";
  for (Eigen::Index i = 0; i < summary.phi.rows(); ++i) {
    const std::string id = static_cast<std::size_t>(i) < summary.row_ids.size()
                               ? summary.row_ids[static_cast<std::size_t>(i)]
                               : std::to_string(i);
    for (std::size_t j : summary.ranking) {
      const auto c = static_cast<Eigen::Index>(j);
      out << id << ',' << summary.names[j] << ',' << summary.values(i, c) << ',' << summary.phi(i, c) << '\n';
    }
  }
}

}  // namespace sdm::forest
