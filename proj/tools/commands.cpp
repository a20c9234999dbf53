#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <json.hpp>

#include "sdm/dataset/csv_io.hpp"
#include "sdm/dataset/fusion.hpp"
#include "sdm/dataset/synth.hpp"
#include "sdm/dataset/trips.hpp"
#include "sdm/diagnostics/ablation.hpp"
#include "sdm/diagnostics/metrics.hpp"
#include "sdm/error.hpp"
#include "sdm/forest/shap.hpp"
#include "sdm/linear/export.hpp"
#include "sdm/linear/significance.hpp"
#include "sdm/selection/select.hpp"
#include "sdm/service/bundle.hpp"
#include "sdm/service/http_api.hpp"
#include "sdm/service/whatif.hpp"

namespace fs = std::filesystem;

namespace sdm::cli {

namespace {

void require_file(const std::string& path, const std::string& what) {
  require(fs::exists(path), ErrorCode::missing_file, what + " not found: " + path);
}

data::FeatureTable load_table(const std::string& path, data::TableMetadata* meta = nullptr) {
  require_file(path, "feature table");
  return data::read_feature_table(path, meta);
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  return out;
}

// Model options shared by fit, evaluate and serve-side fitting.
struct ModelArgs {
  std::string kernel = "bisquare";
  std::string bandwidth = "adaptive:auto";
  std::string criterion = "aicc";
  std::size_t trees = 500;
  std::size_t mtry = 0;
  std::size_t min_leaf = 5;
  std::size_t max_depth = 0;
  std::size_t grf_k = 0;
  std::size_t grf_trees = 100;
  std::uint64_t seed = 1;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--kernel", kernel, "gaussian | exponential | bisquare | boxcar")->capture_default_str();
    cmd->add_option("--bandwidth", bandwidth, "fixed:auto | adaptive:auto | fixed:<meters> | adaptive:<k>")
        ->capture_default_str();
    cmd->add_option("--criterion", criterion, "bandwidth search criterion: aicc | cv")->capture_default_str();
    cmd->add_option("--trees", trees, "trees per random forest")->capture_default_str();
    cmd->add_option("--mtry", mtry, "features tried per split (0 = ceil(p/3))")->capture_default_str();
    cmd->add_option("--min-leaf", min_leaf, "minimum rows per leaf")->capture_default_str();
    cmd->add_option("--max-depth", max_depth, "maximum tree depth (0 = unlimited)")->capture_default_str();
    cmd->add_option("--grf-k", grf_k, "GRF neighbourhood size (0 = ceil(n/4))")->capture_default_str();
    cmd->add_option("--grf-trees", grf_trees, "trees per GRF local forest")->capture_default_str();
    cmd->add_option("--seed", seed, "random seed")->capture_default_str();
  }

  diag::ModelSpec spec(diag::ModelKind kind) const {
    diag::ModelSpec s;
    s.kind = kind;
    s.kernel = spatial::parse_kernel(kernel);
    s.criterion = linear::parse_criterion(criterion);
    if (bandwidth == "fixed:auto") {
      s.mode = spatial::Bandwidth::Mode::fixed;
    } else if (bandwidth == "adaptive:auto") {
      s.mode = spatial::Bandwidth::Mode::adaptive;
    } else {
      s.bandwidth = spatial::parse_bandwidth(bandwidth);
      s.mode = s.bandwidth->mode;
    }
    s.forest.n_trees = kind == diag::ModelKind::grf ? grf_trees : trees;
    s.forest.mtry = mtry;
    s.forest.min_leaf = min_leaf;
    s.forest.max_depth = max_depth;
    s.grf_k = grf_k;
    s.seed = seed;
    return s;
  }
};

void print_metrics(const std::string& label, const diag::MetricsReport& m) {
  std::cout << label << " n=" << m.n << " rmse=" << m.rmse << " r2=" << m.r2 << " adjusted_r2=" << m.adjusted_r2;
  if (m.aicc) std::cout << " aicc=" << *m.aicc;
  std::cout << '\n';
}

}  // namespace

void add_synth(CLI::App& app) {
  struct Args {
    std::string preset = "two-cluster";
    std::uint64_t seed = 1;
    std::string out;
    std::string raw_dir;
    std::size_t n = 0;
  };
  auto a = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("synth", "Generate synthetic datasets with known truth");
  cmd->add_option("--preset", a->preset, "two-cluster | multiscale | uniform | saturating-supply | raw")
      ->capture_default_str();
  cmd->add_option("--seed", a->seed, "random seed")->capture_default_str();
  cmd->add_option("--n", a->n, "override the number of stations");
  cmd->add_option("--out", a->out, "feature table CSV to write (table presets)");
  cmd->add_option("--raw-dir", a->raw_dir, "directory for raw layers and manifest (preset raw)");
  cmd->callback([a] {
    if (a->preset == "raw") {
      require(!a->raw_dir.empty(), ErrorCode::invalid_argument, "preset raw needs --raw-dir");
      data::RawSynthConfig cfg;
      if (a->n) cfg.stations = a->n;
      const auto layers = data::synth_raw(cfg, a->seed);
      fs::create_directories(a->raw_dir);
      const fs::path dir = a->raw_dir;
      data::write_stations(dir / "stations.csv", layers.stations);
      data::write_trips(dir / "trips.csv", layers.trips);
      data::write_pois(dir / "pois.csv", layers.pois);
      data::write_attribute_layer(dir / "census.csv", layers.census);
      data::write_attribute_layer(dir / "households.csv", layers.households);
      std::ofstream m(dir / "manifest.txt");
      m << "# synthetic raw layers, seed " << a->seed << "\n"
        << "stations=stations.csv\ntrips=trips.csv\npois=pois.csv\ncensus=census.csv\nhouseholds=households.csv\n"
        << "window_start=" << layers.window_start << "\nwindow_end=" << layers.window_end << "\n";
      std::cout << "wrote raw layers to " << dir.string() << " (" << layers.stations.size() << " stations, "
                << layers.trips.size() << " trips)\n";
      return;
    }
    require(!a->out.empty(), ErrorCode::invalid_argument, "synth needs --out for table presets");
    data::SynthResult r;
    if (a->preset == "saturating-supply") {
      data::SaturatingConfig cfg;
      if (a->n) cfg.n = a->n;
      r = data::synth_saturating(cfg, a->seed);
    } else {
      auto cfg = data::synth_preset(a->preset);
      if (a->n) cfg.n = a->n;
      r = data::synth_generate(cfg, a->seed);
    }
    data::write_feature_table(a->out, r.table);
    std::cout << "wrote " << r.table.rows() << " rows x " << r.table.features() << " features to " << a->out << '\n';
  });
}

void add_fuse(CLI::App& app) {
  struct Args {
    std::string manifest;
    std::string out;
    bool standardize = false;
  };
  auto a = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("fuse", "Fuse raw layers into a station feature table");
  cmd->add_option("--manifest", a->manifest,
                  "key=value file: stations, trips, pois, census, households, window_start, window_end, "
                  "fusion keys (buffer_radius_m, competitor_radius_m, census_min_households, "
                  "census_radius_step_m, max_trip_duration_h, min/max_trip_distance_km, "
                  "poi_category.<group>, census_mean, boundary) and column.<role> overrides")
      ->required();
  cmd->add_option("--out", a->out, "feature table CSV to write")->required();
  cmd->add_flag("--standardize", a->standardize, "z-score features and target (parameters kept in metadata)");
  cmd->callback([a] {
    require_file(a->manifest, "manifest");
    const auto m = data::Manifest::load(a->manifest);
    const auto cfg = data::fusion_config_from(m);
    for (const char* key : {"stations", "trips", "pois", "census", "households"}) {
      require(m.has(key), ErrorCode::invalid_argument, std::string("manifest lacks '") + key + "'");
      require_file(m.path(key).string(), key);
    }
    require(m.has("window_start") && m.has("window_end"), ErrorCode::invalid_argument,
            "manifest needs window_start and window_end");
    const auto stations = data::read_stations(m.path("stations"), m);
    const auto trips = data::read_trips(m.path("trips"), m);
    const auto pois = data::read_pois(m.path("pois"), m);
    const auto census = data::read_attribute_layer(m.path("census"), m);
    const auto households = data::read_attribute_layer(m.path("households"), m);
    const auto cleaned = data::clean_trips(trips, cfg);
    const auto demand = data::compute_demand(cleaned.trips, stations, data::parse_timestamp(m.get("window_start")),
                                             data::parse_timestamp(m.get("window_end")));
    auto fused = data::fuse_features(stations, pois, census, households, cfg, demand);
    data::TableMetadata meta;
    meta.fusion_fingerprint = cfg.fingerprint();
    meta.default_voronoi_boundary = fused.voronoi.default_boundary;
    const auto table = a->standardize ? data::standardize(fused.table) : fused.table;
    data::write_feature_table(a->out, table, meta);
    std::cout << "trips kept " << cleaned.trips.size() << " of " << trips.size() << " (duration "
              << cleaned.removed_duration << ", distance " << cleaned.removed_distance << ", non-return "
              << cleaned.removed_kind << " removed)\n"
              << "wrote " << table.rows() << " stations x " << table.features() << " features to " << a->out << '\n';
    if (fused.voronoi.default_boundary) {
      std::cout << "note: Voronoi cells clipped to the station hull buffered by " << fused.voronoi.boundary_buffer_m
                << " m (no boundary in manifest)\n";
    }
  });
}

void add_select(CLI::App& app) {
  struct Args {
    std::string table;
    std::string out;
    std::string selected_table;
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    std::string include;
    std::string exclude;
    std::string kernel = "bisquare";
    std::string bandwidth;
  };
  auto a = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("select", "LASSO feature selection with local collinearity screening");
  cmd->add_option("--table", a->table, "feature table CSV")->required();
  cmd->add_option("--out", a->out, "selection report CSV")->required();
  cmd->add_option("--selected-table", a->selected_table, "write the table restricted to selected features");
  cmd->add_option("--folds", a->folds, "cross-validation folds")->capture_default_str();
  cmd->add_option("--seed", a->seed, "fold assignment seed")->capture_default_str();
  cmd->add_option("--include", a->include, "comma-separated features always kept");
  cmd->add_option("--exclude", a->exclude, "comma-separated features always dropped");
  cmd->add_option("--kernel", a->kernel, "kernel for local collinearity")->capture_default_str();
  cmd->add_option("--bandwidth", a->bandwidth,
                  "bandwidth for local collinearity (fixed:<m> | adaptive:<k>); omit to skip screening");
  cmd->callback([a] {
    const auto raw = load_table(a->table);
    const auto table = raw.standardization ? raw : data::standardize(raw);
    selection::SelectionOptions o;
    o.k_folds = a->folds;
    o.seed = a->seed;
    o.manual_include = split(a->include);
    o.manual_exclude = split(a->exclude);
    auto result = selection::lasso_select(table, o);
    if (!a->bandwidth.empty()) {
      selection::screen_collinearity(table, result, spatial::parse_kernel(a->kernel),
                                     spatial::parse_bandwidth(a->bandwidth));
    }
    selection::write_selection_report(a->out, result);
    const auto chosen = result.selected();
    std::cout << "lambda=" << result.lambda << " selected " << chosen.size() << " of " << table.features() << ":";
    for (const auto& f : chosen) std::cout << ' ' << f;
    std::cout << '\n';
    if (!a->selected_table.empty()) {
      require(!chosen.empty(), ErrorCode::numerical, "no features selected");
      data::TableMetadata meta;
      data::read_feature_table(a->table, &meta);
      data::write_feature_table(a->selected_table, raw.select_columns(chosen), meta);
    }
  });
}

void add_fit(CLI::App& app) {
  struct Args {
    std::string table;
    std::string model = "gwr";
    std::string out;
    std::string coefficients;
    std::string significance;
    std::string shap;
    double alpha = 0.05;
    ModelArgs m;
  };
  auto a = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("fit", "Fit one model and save it as a bundle");
  cmd->add_option("--table", a->table, "feature table CSV")->required();
  cmd->add_option("--model", a->model, "ols | gwr | mgwr | rf | rf_coords | grf")->capture_default_str();
  cmd->add_option("--out", a->out, "model bundle JSON to write")->required();
  cmd->add_option("--coefficients", a->coefficients, "local coefficient CSV (gwr, mgwr)");
  cmd->add_option("--significance", a->significance, "coefficient summary CSV (gwr, mgwr)");
  cmd->add_option("--shap", a->shap, "SHAP importance CSV prefix (rf, rf_coords)");
  cmd->add_option("--alpha", a->alpha, "raw significance level")->capture_default_str();
  a->m.add_to(cmd);
  cmd->callback([a] {
    data::TableMetadata meta;
    const auto table = load_table(a->table, &meta);
    const auto kind = diag::parse_model_kind(a->model);
    const auto bundle = service::fit_bundle(table, a->m.spec(kind), meta.fusion_fingerprint);
    service::save_bundle(a->out, bundle);
    const Eigen::VectorXd fitted = bundle.fitted();
    std::optional<double> trS;
    std::optional<double> aicc;
    if (bundle.ols) trS = bundle.ols->trS, aicc = bundle.ols->aicc;
    if (bundle.gwr) trS = bundle.gwr->trS, aicc = bundle.gwr->aicc;
    if (bundle.mgwr) trS = bundle.mgwr->trS, aicc = bundle.mgwr->aicc;
    auto m = diag::metrics(bundle.y, fitted, trS);
    if (aicc) m.aicc = aicc;  // standardized-scale AICc as fitted
    print_metrics("in-sample", m);
    std::cout << "settings " << bundle.settings.dump() << '\n';
    std::cout << "standardization " << (bundle.standardization ? "applied" : "not applied") << '\n';

    std::vector<std::string> labels;
    if (bundle.mgwr) {
      for (std::size_t b : bundle.mgwr->bandwidths) labels.push_back(std::to_string(b));
    }
    if (!a->coefficients.empty() || !a->significance.empty()) {
      require(bundle.gwr || bundle.mgwr, ErrorCode::unsupported, "coefficient export needs a gwr or mgwr model");
      const auto report = bundle.gwr ? linear::significance(*bundle.gwr, a->alpha)
                                     : linear::significance(*bundle.mgwr, a->alpha);
      if (!a->coefficients.empty()) {
        const auto& beta = bundle.gwr ? bundle.gwr->beta : bundle.mgwr->beta;
        const auto& se = bundle.gwr ? bundle.gwr->se : bundle.mgwr->se;
        const auto& t = bundle.gwr ? bundle.gwr->tvalues : bundle.mgwr->tvalues;
        linear::write_coefficients(a->coefficients, bundle.station_ids, bundle.locations, beta, se, t, report);
      }
      if (!a->significance.empty()) linear::write_significance(a->significance, report, labels);
    }
    if (!a->shap.empty()) {
      require(bundle.forest.has_value(), ErrorCode::unsupported, "SHAP export needs an rf or rf_coords model");
      const auto summary = forest::shap_summary(*bundle.forest, table.standardization ? data::destandardize(table) : table);
      forest::write_shap_importance(a->shap + "_importance.csv", summary);
      forest::write_shap_beeswarm(a->shap + "_beeswarm.csv", summary);
    }
    std::cout << "saved " << diag::to_string(kind) << " bundle to " << a->out << '\n';
  });
}

void add_evaluate(CLI::App& app) {
  struct Args {
    std::string table;
    std::vector<std::string> bundles;
    std::string models;
    std::size_t folds = 10;
    std::size_t permutations = 999;
    std::string out;
    ModelArgs m;
  };
  auto a = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("evaluate", "Score bundles on a table, or compare models by cross-validation");
  cmd->add_option("--table", a->table, "feature table CSV")->required();
  cmd->add_option("--bundle", a->bundles, "model bundle(s) to score on the table (repeatable)");
  cmd->add_option("--models", a->models, "comma-separated model kinds for a comparison table");
  cmd->add_option("--folds", a->folds, "cross-validation folds")->capture_default_str();
  cmd->add_option("--permutations", a->permutations, "Moran's I permutations")->capture_default_str();
  cmd->add_option("--out", a->out, "comparison table CSV");
  a->m.add_to(cmd);
  cmd->callback([a] {
    const auto raw_in = load_table(a->table);
    const auto table = raw_in.standardization ? data::destandardize(raw_in) : raw_in;
    require(!a->bundles.empty() || !a->models.empty(), ErrorCode::invalid_argument,
            "evaluate needs --bundle or --models");
    for (const auto& path : a->bundles) {
      const auto b = service::load_bundle(path);
      Eigen::MatrixXd X(table.X.rows(), static_cast<Eigen::Index>(b.features.size()));
      for (std::size_t j = 0; j < b.features.size(); ++j) {
        X.col(static_cast<Eigen::Index>(j)) = table.X.col(static_cast<Eigen::Index>(table.column_index(b.features[j].name)));
      }
      const bool training = b.station_ids == table.station_ids;
      const Eigen::VectorXd pred =
          b.kind == diag::ModelKind::mgwr || training ? b.fitted() : b.predict(table.locations, X);
      print_metrics(path + (training ? " (training rows)" : ""), diag::metrics(table.y, pred));
    }
    if (!a->models.empty()) {
      std::vector<diag::ModelSpec> specs;
      for (const auto& k : split(a->models)) specs.push_back(a->m.spec(diag::parse_model_kind(k)));
      diag::EvaluationOptions o;
      o.k_folds = a->folds;
      o.seed = a->m.seed;
      o.moran_permutations = a->permutations;
      const auto rows = diag::evaluate_models(table, specs, o);
      std::cout << "standardization applied to linear models; forests use raw units\n";
      std::cout << diag::format_table_text(rows, diag::TableLayout::models);
      if (!a->out.empty()) diag::write_table_csv(a->out, rows, diag::TableLayout::models);
    }
  });
}

void add_ablate(CLI::App& app) {
  struct Args {
    std::string table;
    std::string kernels = "gaussian,bisquare,exponential";
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    std::size_t permutations = 999;
    std::string out;
  };
  auto a = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("ablate", "GWR under every bandwidth type, criterion and kernel");
  cmd->add_option("--table", a->table, "feature table CSV")->required();
  cmd->add_option("--kernels", a->kernels, "comma-separated kernels")->capture_default_str();
  cmd->add_option("--folds", a->folds, "cross-validation folds")->capture_default_str();
  cmd->add_option("--seed", a->seed, "fold and permutation seed")->capture_default_str();
  cmd->add_option("--permutations", a->permutations, "Moran's I permutations")->capture_default_str();
  cmd->add_option("--out", a->out, "comparison table CSV");
  cmd->callback([a] {
    const auto table = load_table(a->table);
    std::vector<spatial::Kernel> kernels;
    for (const auto& k : split(a->kernels)) kernels.push_back(spatial::parse_kernel(k));
    diag::EvaluationOptions o;
    o.k_folds = a->folds;
    o.seed = a->seed;
    o.moran_permutations = a->permutations;
    const auto rows = diag::ablate(table, diag::full_grid(kernels), o);
    std::cout << diag::format_table_text(rows, diag::TableLayout::gwr_settings);
    if (!a->out.empty()) diag::write_table_csv(a->out, rows, diag::TableLayout::gwr_settings);
  });
}

namespace {

std::optional<service::FusionSource> fusion_source(const std::string& manifest) {
  if (manifest.empty()) return std::nullopt;
  require_file(manifest, "manifest");
  const auto m = data::Manifest::load(manifest);
  service::FusionSource s;
  s.config = data::fusion_config_from(m);
  s.stations = data::read_stations(m.path("stations"), m);
  s.pois = data::read_pois(m.path("pois"), m);
  s.census = data::read_attribute_layer(m.path("census"), m);
  s.households = data::read_attribute_layer(m.path("households"), m);
  return s;
}

std::map<std::string, service::ModelBundle> load_bundles(const std::vector<std::string>& specs) {
  std::map<std::string, service::ModelBundle> out;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    auto bundle = service::load_bundle(path);
    const std::string name = eq == std::string::npos ? std::string(diag::to_string(bundle.kind)) : spec.substr(0, eq);
    require(!out.count(name), ErrorCode::invalid_argument, "duplicate model name '" + name + "'");
    out.emplace(name, std::move(bundle));
  }
  return out;
}

}  // namespace

void add_whatif(CLI::App& app) {
  struct Args {
    std::vector<std::string> bundles;
    std::vector<std::string> models;
    std::string stations;
    std::string manifest;
    double x = 0.0;
    double y = 0.0;
    std::size_t max_supply = 10;
    std::string mode;
    std::vector<std::string> features;
    std::string out;
    std::string json_out;
    bool allow_extrapolation = false;
  };
  auto a = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("whatif", "Demand curve over station supply for a hypothetical location");
  cmd->add_option("--bundle", a->bundles, "[name=]bundle.json (repeatable)")->required();
  cmd->add_option("--model", a->models, "restrict the curves to these loaded model names (repeatable)");
  cmd->add_option("--stations", a->stations, "fused feature table of existing stations")->required();
  cmd->add_option("--manifest", a->manifest, "raw-layer manifest enabling auto-fuse");
  cmd->add_option("--x", a->x, "projected easting in meters")->required();
  cmd->add_option("--y", a->y, "projected northing in meters")->required();
  cmd->add_option("--max-supply", a->max_supply, "largest number of cars")->capture_default_str();
  cmd->add_option("--mode", a->mode, "auto-fuse | fixed-features (default: auto-fuse with --manifest)");
  cmd->add_option("--feature", a->features, "name=value base feature (fixed-features, repeatable)");
  cmd->add_option("--out", a->out, "curve CSV (supply_cars, one column per model)");
  cmd->add_option("--json", a->json_out, "full response as JSON");
  cmd->add_flag("--allow-extrapolation", a->allow_extrapolation, "answer outside the station hull with a warning");
  cmd->callback([a] {
    service::ServiceOptions so;
    so.allow_extrapolation = a->allow_extrapolation;
    const service::WhatIfService svc(load_bundles(a->bundles), load_table(a->stations), fusion_source(a->manifest), so);
    service::WhatIfRequest req;
    req.location = {a->x, a->y};
    req.mode = a->mode.empty() ? (a->manifest.empty() ? service::FeatureMode::fixed_features
                                                      : service::FeatureMode::auto_fuse)
                               : service::parse_feature_mode(a->mode);
    req.supply_max = a->max_supply;
    req.models = a->models;
    for (const auto& f : a->features) {
      const auto eq = f.find('=');
      require(eq != std::string::npos, ErrorCode::invalid_argument, "--feature expects name=value");
      try {
        req.features[f.substr(0, eq)] = std::stod(f.substr(eq + 1));
      } catch (const std::exception&) {
        fail(ErrorCode::invalid_argument, "--feature value is not a number: " + f);
      }
    }
    const auto r = svc.whatif(req);
    std::ostringstream csv;
    csv << "supply_cars";
    for (const auto& c : r.curves) csv << ',' << c.model << "_demand_trips_per_month";
    csv << '\n';
    csv.precision(10);
    for (std::size_t k = 0; k < r.supply_cars.size(); ++k) {
      csv << r.supply_cars[k];
      for (const auto& c : r.curves) csv << ',' << c.demand_trips_per_month[k];
      csv << '\n';
    }
    if (a->out.empty()) {
      std::cout << csv.str();
    } else {
      std::ofstream(a->out) << csv.str();
    }
    if (!a->json_out.empty()) std::ofstream(a->json_out) << service::to_json(r).dump(2) << '\n';
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  });
}

void add_serve(CLI::App& app) {
  struct Args {
    std::vector<std::string> bundles;
    std::string stations;
    std::string manifest;
    std::string host = "127.0.0.1";
    int port = 8080;
    bool allow_extrapolation = false;
  };
  auto a = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("serve", "HTTP JSON API under /v1 (health, stations, predict, whatif)");
  cmd->add_option("--bundle", a->bundles, "[name=]bundle.json (repeatable)")->required();
  cmd->add_option("--stations", a->stations, "fused feature table of existing stations")->required();
  cmd->add_option("--manifest", a->manifest, "raw-layer manifest enabling auto-fuse");
  cmd->add_option("--host", a->host, "listen address")->capture_default_str();
  cmd->add_option("--port", a->port, "listen port")->capture_default_str();
  cmd->add_flag("--allow-extrapolation", a->allow_extrapolation,
                "answer what-if requests outside the station hull with a warning instead of 422");
  cmd->callback([a] {
    service::ServiceOptions so;
    so.allow_extrapolation = a->allow_extrapolation;
    const service::WhatIfService svc(load_bundles(a->bundles), load_table(a->stations), fusion_source(a->manifest), so);
    std::cout << "listening on http://" << a->host << ':' << a->port << "/v1" << std::endl;
    service::serve(svc, a->host, a->port);
  });
}

}  // namespace sdm::cli
