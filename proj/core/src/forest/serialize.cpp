#include "sdm/forest/serialize.hpp"

#include "sdm/error.hpp"

namespace sdm::forest {

using nlohmann::json;

namespace {

void check_version(const json& j, const char* what) {
  require(j.is_object() && j.contains("format_version"), ErrorCode::format_version,
          std::string(what) + " lacks a format_version");
  const int v = j.at("format_version").get<int>();
  require(v == kForestFormatVersion, ErrorCode::format_version,
          std::string(what) + " format_version " + std::to_string(v) + " is not supported (expected " +
              std::to_string(kForestFormatVersion) + ")");
}

// Trees are stored column-wise to keep files compact.
json tree_to_json(const Tree& t) {
  json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
       value = json::array(), n = json::array(), cover = json::array();
  for (const auto& node : t.nodes) {
    feature.push_back(node.feature);
    threshold.push_back(node.threshold);
    left.push_back(node.left);
    right.push_back(node.right);
    value.push_back(node.value);
    n.push_back(node.n_samples);
    cover.push_back(node.cover);
  }
  return json{{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right},
              {"value", value},     {"n_samples", n},         {"cover", cover}};
}

Tree tree_from_json(const json& j) {
  Tree t;
  const auto& feature = j.at("feature");
  const std::size_t count = feature.size();
  t.nodes.resize(count);
  for (const char* key : {"threshold", "left", "right", "value", "n_samples", "cover"}) {
    require(j.at(key).size() == count, ErrorCode::format_version, "tree arrays differ in length");
  }
  for (std::size_t i = 0; i < count; ++i) {
    TreeNode& node = t.nodes[i];
    node.feature = feature[i].get<int>();
    node.threshold = j["threshold"][i].get<double>();
    node.left = j["left"][i].get<int>();
    node.right = j["right"][i].get<int>();
    node.value = j["value"][i].get<double>();
    node.n_samples = j["n_samples"][i].get<std::uint32_t>();
    node.cover = j["cover"][i].get<double>();
    if (!node.is_leaf()) {
      require(node.left > static_cast<int>(i) && node.right > static_cast<int>(i) &&
                  node.left < static_cast<int>(count) && node.right < static_cast<int>(count),
              ErrorCode::format_version, "tree child index out of range");
    }
  }
  require(count > 0, ErrorCode::format_version, "tree has no nodes");
  return t;
}

}  // namespace

json to_json(const ForestParams& p) {
  return json{{"n_trees", p.n_trees},     {"mtry", p.mtry},           {"min_leaf", p.min_leaf},
              {"max_depth", p.max_depth}, {"bootstrap", p.bootstrap}};
}

ForestParams params_from_json(const json& j) {
  ForestParams p;
  p.n_trees = j.at("n_trees").get<std::size_t>();
  p.mtry = j.at("mtry").get<std::size_t>();
  p.min_leaf = j.at("min_leaf").get<std::size_t>();
  p.max_depth = j.at("max_depth").get<std::size_t>();
  p.bootstrap = j.at("bootstrap").get<bool>();
  return p;
}

json to_json(const ForestModel& m) {
  json trees = json::array();
  for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
  return json{{"format_version", kForestFormatVersion},
              {"kind", "random_forest"},
              {"params", to_json(m.params)},
              {"seed", m.seed},
              {"feature_names", m.feature_names},
              {"uses_coordinates", m.uses_coordinates},
              {"base_value", m.base_value},
              {"trees", trees}};
}

ForestModel forest_from_json(const json& j) {
  check_version(j, "forest model");
  ForestModel m;
  m.params = params_from_json(j.at("params"));
  m.seed = j.at("seed").get<std::uint64_t>();
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  m.uses_coordinates = j.at("uses_coordinates").get<bool>();
  m.base_value = j.at("base_value").get<double>();
  for (const auto& t : j.at("trees")) {
    m.trees.push_back(tree_from_json(t));
    for (const auto& node : m.trees.back().nodes) {
      require(node.feature < static_cast<int>(m.feature_names.size()), ErrorCode::format_version,
              "tree splits on an unknown feature");
    }
  }
  require(m.trees.size() == m.params.n_trees, ErrorCode::format_version,
          "forest tree count differs from n_trees");
  return m;
}

json to_json(const GrfModel& m) {
  json local = json::array();
  for (const auto& f : m.local) {
    json trees = json::array();
    for (const auto& t : f.trees) trees.push_back(tree_to_json(t));
    local.push_back(json{{"base_value", f.base_value}, {"trees", trees}});
  }
  json xs = json::array(), ys = json::array();
  for (const auto& p : m.locations) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  return json{{"format_version", kForestFormatVersion},
              {"kind", "grf"},
              {"k", m.k},
              {"seed", m.seed},
              {"params", to_json(m.params)},
              {"feature_names", m.feature_names},
              {"x", xs},
              {"y", ys},
              {"neighbourhoods", m.neighbourhoods},
              {"local", local}};
}

GrfModel grf_from_json(const json& j) {
  check_version(j, "GRF model");
  GrfModel m;
  m.k = j.at("k").get<std::size_t>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.params = params_from_json(j.at("params"));
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  const auto xs = j.at("x").get<std::vector<double>>();
  const auto ys = j.at("y").get<std::vector<double>>();
  require(xs.size() == ys.size(), ErrorCode::format_version, "GRF coordinate arrays differ in length");
  for (std::size_t i = 0; i < xs.size(); ++i) m.locations.push_back({xs[i], ys[i]});
  m.neighbourhoods = j.at("neighbourhoods").get<std::vector<std::vector<std::size_t>>>();
  for (const auto& lj : j.at("local")) {
    ForestModel f;
    f.params = m.params;
    f.seed = m.seed;
    f.feature_names = m.feature_names;
    f.base_value = lj.at("base_value").get<double>();
    for (const auto& t : lj.at("trees")) f.trees.push_back(tree_from_json(t));
    m.local.push_back(std::move(f));
  }
  require(m.local.size() == m.locations.size(), ErrorCode::format_version,
          "GRF needs one local forest per station");
  m.index = spatial::SpatialIndex(m.locations);
  return m;
}

}  // namespace sdm::forest
