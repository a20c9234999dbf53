#include "sdm/service/bundle.hpp"

#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include "sdm/dataset/csv_io.hpp"
#include "sdm/error.hpp"
#include "sdm/forest/serialize.hpp"
#include "sdm/linear/bandwidth.hpp"

namespace sdm::service {

using nlohmann::json;

namespace {

// JSON has no NaN; undefined entries (e.g. a standard error where x = 0) travel as null.
json numbers(const double* p, Eigen::Index n) {
  json a = json::array();
  for (Eigen::Index i = 0; i < n; ++i) a.push_back(std::isfinite(p[i]) ? json(p[i]) : json(nullptr));
  return a;
}

std::vector<double> numbers(const json& j) {
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(e.is_null() ? std::numeric_limits<double>::quiet_NaN() : e.get<double>());
  return v;
}

json vec(const Eigen::VectorXd& v) { return numbers(v.data(), v.size()); }

Eigen::VectorXd vec(const json& j) {
  const auto v = numbers(j);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json mat(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const Eigen::RowVectorXd r = m.row(i);
    rows.push_back(numbers(r.data(), r.size()));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Eigen::MatrixXd mat(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  require(static_cast<Eigen::Index>(data.size()) == rows, ErrorCode::format_version, "matrix row count mismatch");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto r = numbers(data[static_cast<std::size_t>(i)]);
    require(static_cast<Eigen::Index>(r.size()) == cols, ErrorCode::format_version, "matrix column count mismatch");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = r[static_cast<std::size_t>(c)];
  }
  return m;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

data::FeatureTable raw_of(const data::FeatureTable& t) {
  return t.standardization ? data::destandardize(t) : t;
}

Eigen::VectorXd to_target_units(const std::optional<data::Standardization>& s, Eigen::VectorXd v) {
  if (s) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = data::unstandardize_target(*s, v(i));
  }
  return v;
}

Eigen::MatrixXd with_coords(const Eigen::MatrixXd& X, const std::vector<spatial::Point>& at) {
  Eigen::MatrixXd out(X.rows(), X.cols() + 2);
  out.leftCols(X.cols()) = X;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    out(i, X.cols()) = at[static_cast<std::size_t>(i)].x;
    out(i, X.cols() + 1) = at[static_cast<std::size_t>(i)].y;
  }
  return out;
}

json column_json(const data::Column& c) {
  return json{{"name", c.name}, {"unit", c.unit}, {"provenance", c.provenance}};
}

data::Column column_from(const json& j) {
  return {j.at("name").get<std::string>(), j.value("unit", ""), j.value("provenance", "")};
}

json ols_json(const linear::OlsFit& f) {
  return json{{"names", f.names},   {"beta", vec(f.beta)},         {"se", vec(f.se)},
              {"tvalues", vec(f.tvalues)}, {"fitted", vec(f.fitted)}, {"hat_diag", vec(f.hat_diag)},
              {"y", vec(f.y)},      {"rss", f.rss},                {"sigma_hat", f.sigma_hat},
              {"trS", f.trS},       {"aicc", f.aicc}};
}

linear::OlsFit ols_from(const json& j) {
  linear::OlsFit f;
  f.names = j.at("names").get<std::vector<std::string>>();
  f.beta = vec(j.at("beta"));
  f.se = vec(j.at("se"));
  f.tvalues = vec(j.at("tvalues"));
  f.fitted = vec(j.at("fitted"));
  f.hat_diag = vec(j.at("hat_diag"));
  f.y = vec(j.at("y"));
  f.residuals = f.y - f.fitted;
  f.rss = j.at("rss").get<double>();
  f.sigma_hat = j.at("sigma_hat").get<double>();
  f.trS = j.at("trS").get<double>();
  f.aicc = j.at("aicc").get<double>();
  return f;
}

json gwr_json(const linear::GwrFit& f) {
  json xs = json::array(), ys = json::array();
  for (const auto& p : f.locations) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  return json{{"kernel", spatial::to_string(f.kernel)},
              {"bandwidth", spatial::to_string(f.bandwidth)},
              {"names", f.names},
              {"resolved_bandwidth", vec(f.resolved_bandwidth)},
              {"beta", mat(f.beta)},
              {"se", mat(f.se)},
              {"tvalues", mat(f.tvalues)},
              {"hat_diag", vec(f.hat_diag)},
              {"fitted", vec(f.fitted)},
              {"y", vec(f.y)},
              {"X", mat(f.X)},
              {"x", xs},
              {"y_coord", ys},
              {"trS", f.trS},
              {"rss", f.rss},
              {"sigma_hat", f.sigma_hat},
              {"aicc", f.aicc}};
}

linear::GwrFit gwr_from(const json& j) {
  linear::GwrFit f;
  f.kernel = spatial::parse_kernel(j.at("kernel").get<std::string>());
  f.bandwidth = spatial::parse_bandwidth(j.at("bandwidth").get<std::string>());
  f.names = j.at("names").get<std::vector<std::string>>();
  f.resolved_bandwidth = vec(j.at("resolved_bandwidth"));
  f.beta = mat(j.at("beta"));
  f.se = mat(j.at("se"));
  f.tvalues = mat(j.at("tvalues"));
  f.hat_diag = vec(j.at("hat_diag"));
  f.fitted = vec(j.at("fitted"));
  f.y = vec(j.at("y"));
  f.residuals = f.y - f.fitted;
  f.X = mat(j.at("X"));
  const auto xs = j.at("x").get<std::vector<double>>();
  const auto ys = j.at("y_coord").get<std::vector<double>>();
  require(xs.size() == ys.size() && static_cast<Eigen::Index>(xs.size()) == f.X.rows(), ErrorCode::format_version,
          "GWR payload coordinate count mismatch");
  for (std::size_t i = 0; i < xs.size(); ++i) f.locations.push_back({xs[i], ys[i]});
  f.trS = j.at("trS").get<double>();
  f.rss = j.at("rss").get<double>();
  f.sigma_hat = j.at("sigma_hat").get<double>();
  f.aicc = j.at("aicc").get<double>();
  f.context = std::make_shared<const linear::LocalContext>(f.locations);
  return f;
}

json mgwr_json(const linear::MgwrFit& f) {
  return json{{"kernel", spatial::to_string(f.kernel)},
              {"criterion", linear::to_string(f.criterion)},
              {"names", f.names},
              {"bandwidths", f.bandwidths},
              {"median_bandwidth_km", f.median_bandwidth_km},
              {"beta", mat(f.beta)},
              {"se", mat(f.se)},
              {"tvalues", mat(f.tvalues)},
              {"partial_fits", mat(f.partial_fits)},
              {"enp", vec(f.enp)},
              {"hat_diag", vec(f.hat_diag)},
              {"fitted", vec(f.fitted)},
              {"y", vec(f.y)},
              {"trS", f.trS},
              {"rss", f.rss},
              {"sigma_hat", f.sigma_hat},
              {"aicc", f.aicc},
              {"initial_bandwidth", f.initial_bandwidth},
              {"converged", f.converged},
              {"iterations", f.trace.size()}};
}

linear::MgwrFit mgwr_from(const json& j) {
  linear::MgwrFit f;
  f.kernel = spatial::parse_kernel(j.at("kernel").get<std::string>());
  f.criterion = linear::parse_criterion(j.at("criterion").get<std::string>());
  f.names = j.at("names").get<std::vector<std::string>>();
  f.bandwidths = j.at("bandwidths").get<std::vector<std::size_t>>();
  f.median_bandwidth_km = j.at("median_bandwidth_km").get<std::vector<double>>();
  f.beta = mat(j.at("beta"));
  f.se = mat(j.at("se"));
  f.tvalues = mat(j.at("tvalues"));
  f.partial_fits = mat(j.at("partial_fits"));
  f.enp = vec(j.at("enp"));
  f.hat_diag = vec(j.at("hat_diag"));
  f.fitted = vec(j.at("fitted"));
  f.y = vec(j.at("y"));
  f.residuals = f.y - f.fitted;
  f.trS = j.at("trS").get<double>();
  f.rss = j.at("rss").get<double>();
  f.sigma_hat = j.at("sigma_hat").get<double>();
  f.aicc = j.at("aicc").get<double>();
  f.initial_bandwidth = j.at("initial_bandwidth").get<std::size_t>();
  f.converged = j.at("converged").get<bool>();
  // The backfitting trace is summarised by its length only.
  f.trace.resize(j.at("iterations").get<std::size_t>());
  return f;
}

}  // namespace

std::vector<std::string> ModelBundle::feature_names() const {
  std::vector<std::string> out;
  for (const auto& c : features) out.push_back(c.name);
  return out;
}

Eigen::VectorXd ModelBundle::predict(const std::vector<spatial::Point>& at, const Eigen::MatrixXd& raw_x) const {
  require(static_cast<std::size_t>(raw_x.cols()) == features.size(), ErrorCode::schema_mismatch,
          "model expects " + std::to_string(features.size()) + " features, got " + std::to_string(raw_x.cols()));
  require(at.size() == static_cast<std::size_t>(raw_x.rows()), ErrorCode::schema_mismatch,
          "locations and feature rows differ in count");
  require(raw_x.allFinite(), ErrorCode::schema_mismatch, "feature values must be finite");
  switch (kind) {
    case diag::ModelKind::ols: {
      const Eigen::MatrixXd Xs = standardization ? data::apply_standardization(*standardization, raw_x) : raw_x;
      return to_target_units(standardization, ols->predict(Xs));
    }
    case diag::ModelKind::gwr: {
      const Eigen::MatrixXd Xs = standardization ? data::apply_standardization(*standardization, raw_x) : raw_x;
      const auto p = linear::gwr_predict(*gwr, at, Xs);
      for (std::size_t i = 0; i < p.ok.size(); ++i) require(p.ok[i], ErrorCode::rank_deficient, p.errors[i]);
      return to_target_units(standardization, p.values);
    }
    case diag::ModelKind::mgwr:
      fail(ErrorCode::unsupported, "MGWR does not support out-of-sample prediction");
    case diag::ModelKind::rf:
      return forest::rf_predict(*forest, raw_x);
    case diag::ModelKind::rf_coords:
      return forest::rf_predict(*forest, with_coords(raw_x, at));
    case diag::ModelKind::grf:
      return forest::grf_predict(*grf, at, raw_x);
  }
  fail(ErrorCode::unfitted_model, "bundle holds no model");
}

Eigen::VectorXd ModelBundle::fitted() const {
  switch (kind) {
    case diag::ModelKind::ols: return to_target_units(standardization, ols->fitted);
    case diag::ModelKind::gwr: return to_target_units(standardization, gwr->fitted);
    case diag::ModelKind::mgwr: return to_target_units(standardization, mgwr->fitted);
    default: return predict(locations, X);
  }
}

ModelBundle fit_bundle(const data::FeatureTable& table, const diag::ModelSpec& spec,
                       const std::string& fusion_fingerprint, std::optional<std::string> fit_timestamp) {
  table.validate();
  const data::FeatureTable raw = raw_of(table);
  ModelBundle b;
  b.kind = spec.kind;
  b.toolkit_version = data::toolkit_version();
  b.fit_timestamp = fit_timestamp ? *fit_timestamp : utc_now();
  b.seed = spec.seed;
  b.features = raw.columns;
  b.target = raw.target;
  b.fusion_fingerprint = fusion_fingerprint;
  b.station_ids = raw.station_ids;
  b.locations = raw.locations;
  b.X = raw.X;
  b.y = raw.y;
  b.settings = json::object();

  switch (spec.kind) {
    case diag::ModelKind::ols:
    case diag::ModelKind::gwr:
    case diag::ModelKind::mgwr: {
      const data::FeatureTable st = data::standardize(raw);
      b.standardization = st.standardization;
      if (spec.kind == diag::ModelKind::ols) {
        b.ols = linear::ols_fit(st);
      } else if (spec.kind == diag::ModelKind::gwr) {
        spatial::Bandwidth bw;
        if (spec.bandwidth) {
          bw = *spec.bandwidth;
          b.settings["bandwidth_selection"] = "manual";
        } else {
          const auto sel = linear::select_bandwidth(st, spec.kernel, spec.mode, spec.criterion);
          bw = sel.bandwidth;
          b.settings["bandwidth_selection"] = linear::to_string(spec.criterion);
          b.settings["criterion_score"] = sel.score;
        }
        b.settings["kernel"] = spatial::to_string(spec.kernel);
        b.settings["bandwidth"] = spatial::to_string(bw);
        b.gwr = linear::gwr_fit(st, spec.kernel, bw);
      } else {
        linear::MgwrOptions mo;
        mo.kernel = spec.kernel;
        mo.criterion = spec.criterion;
        b.settings["kernel"] = spatial::to_string(spec.kernel);
        b.settings["bandwidth_selection"] = linear::to_string(spec.criterion);
        b.mgwr = linear::mgwr_fit(st, mo);
      }
      break;
    }
    case diag::ModelKind::rf:
    case diag::ModelKind::rf_coords:
      b.forest = forest::rf_fit(raw, spec.forest, spec.seed, spec.kind == diag::ModelKind::rf_coords);
      b.settings["forest"] = forest::to_json(spec.forest);
      break;
    case diag::ModelKind::grf: {
      const std::size_t k = spec.grf_k ? spec.grf_k : forest::default_grf_k(raw.rows(), raw.features());
      b.grf = forest::grf_fit(raw, k, spec.forest, spec.seed);
      b.settings["forest"] = forest::to_json(spec.forest);
      b.settings["bandwidth"] = "adaptive:" + std::to_string(k);
      b.settings["kernel"] = "boxcar";
      break;
    }
  }
  return b;
}

json to_json(const ModelBundle& b) {
  json j;
  j["format"] = kBundleFormat;
  j["format_version"] = kBundleFormatVersion;
  j["kind"] = diag::to_string(b.kind);
  j["toolkit_version"] = b.toolkit_version;
  j["fit_timestamp"] = b.fit_timestamp;
  j["seed"] = b.seed;
  j["features"] = json::array();
  for (const auto& c : b.features) j["features"].push_back(column_json(c));
  j["target"] = column_json(b.target);
  if (b.standardization) {
    const auto& s = *b.standardization;
    j["standardization"] = {{"x_mean", vec(s.x_mean)}, {"x_std", vec(s.x_std)},
                            {"y_mean", s.y_mean},      {"y_std", s.y_std}};
  } else {
    j["standardization"] = nullptr;
  }
  j["fusion_fingerprint"] = b.fusion_fingerprint;
  j["settings"] = b.settings;
  json xs = json::array(), ys = json::array();
  for (const auto& p : b.locations) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  j["training"] = {{"station_ids", b.station_ids}, {"x", xs}, {"y", ys}, {"X", mat(b.X)}, {"target", vec(b.y)}};
  switch (b.kind) {
    case diag::ModelKind::ols: j["payload"] = ols_json(*b.ols); break;
    case diag::ModelKind::gwr: j["payload"] = gwr_json(*b.gwr); break;
    case diag::ModelKind::mgwr: j["payload"] = mgwr_json(*b.mgwr); break;
    case diag::ModelKind::rf:
    case diag::ModelKind::rf_coords: j["payload"] = forest::to_json(*b.forest); break;
    case diag::ModelKind::grf: j["payload"] = forest::to_json(*b.grf); break;
  }
  return j;
}

ModelBundle bundle_from_json(const json& j) {
  require(j.is_object() && j.value("format", "") == kBundleFormat, ErrorCode::format_version,
          "not a model bundle");
  const int version = j.at("format_version").get<int>();
  require(version == kBundleFormatVersion, ErrorCode::format_version,
          "model bundle format_version " + std::to_string(version) + " is not supported (expected " +
              std::to_string(kBundleFormatVersion) + ")");
  try {
    ModelBundle b;
    b.kind = diag::parse_model_kind(j.at("kind").get<std::string>());
    b.toolkit_version = j.at("toolkit_version").get<std::string>();
    b.fit_timestamp = j.at("fit_timestamp").get<std::string>();
    b.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& c : j.at("features")) b.features.push_back(column_from(c));
    b.target = column_from(j.at("target"));
    if (!j.at("standardization").is_null()) {
      const auto& s = j["standardization"];
      data::Standardization st;
      st.x_mean = vec(s.at("x_mean"));
      st.x_std = vec(s.at("x_std"));
      st.y_mean = s.at("y_mean").get<double>();
      st.y_std = s.at("y_std").get<double>();
      b.standardization = st;
    }
    b.fusion_fingerprint = j.at("fusion_fingerprint").get<std::string>();
    b.settings = j.at("settings");
    const auto& t = j.at("training");
    b.station_ids = t.at("station_ids").get<std::vector<std::string>>();
    const auto xs = t.at("x").get<std::vector<double>>();
    const auto ys = t.at("y").get<std::vector<double>>();
    require(xs.size() == ys.size() && xs.size() == b.station_ids.size(), ErrorCode::format_version,
            "training station arrays differ in length");
    for (std::size_t i = 0; i < xs.size(); ++i) b.locations.push_back({xs[i], ys[i]});
    b.X = mat(t.at("X"));
    b.y = vec(t.at("target"));
    const auto& p = j.at("payload");
    switch (b.kind) {
      case diag::ModelKind::ols: b.ols = ols_from(p); break;
      case diag::ModelKind::gwr: b.gwr = gwr_from(p); break;
      case diag::ModelKind::mgwr: b.mgwr = mgwr_from(p); break;
      case diag::ModelKind::rf:
      case diag::ModelKind::rf_coords: b.forest = forest::forest_from_json(p); break;
      case diag::ModelKind::grf: b.grf = forest::grf_from_json(p); break;
    }
    return b;
  } catch (const json::exception& e) {
    fail(ErrorCode::format_version, std::string("malformed model bundle: ") + e.what());
  }
}

std::string serialize(const ModelBundle& bundle) { return to_json(bundle).dump(1) + "\n"; }

ModelBundle deserialize(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::format_version, std::string("model bundle is not valid JSON: ") + e.what());
  }
  return bundle_from_json(j);
}

void save_bundle(const std::filesystem::path& path, const ModelBundle& bundle) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io, "cannot write model bundle " + path.string());
  out << serialize(bundle);
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  require(std::filesystem::exists(path), ErrorCode::missing_file, "model bundle not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

}  // namespace sdm::service
