#include "sdm/diagnostics/ablation.hpp"

#include <algorithm>
#include <cctype>

#include "sdm/diagnostics/metrics.hpp"
#include "sdm/diagnostics/moran.hpp"
#include "sdm/error.hpp"
#include "sdm/forest/grf.hpp"
#include "sdm/linear/gwr.hpp"
#include "sdm/linear/mgwr.hpp"
#include "sdm/linear/ols.hpp"
#include "sdm/linear/significance.hpp"

namespace sdm::diag {

namespace {

std::string title_case(std::string_view s) {
  std::string out(s);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

std::string mode_label(spatial::Bandwidth::Mode m) {
  return m == spatial::Bandwidth::Mode::fixed ? "Fixed" : "Adaptive";
}

std::string criterion_label(linear::Criterion c) {
  return c == linear::Criterion::aicc ? "AICc" : "CV";
}

data::FeatureTable standardized(const data::FeatureTable& t) {
  return t.standardization ? t : data::standardize(t);
}

}  // namespace

ComparisonRow evaluate_model(const data::FeatureTable& table, const ModelSpec& spec,
                             const EvaluationOptions& options) {
  table.validate();
  ComparisonRow row;
  row.algorithm = std::string(display_name(spec.kind));
  const auto moran = [&](const Eigen::VectorXd& residuals) {
    return residual_moran(residuals, table.locations, options.moran_permutations, options.seed,
                          options.moran_neighbours)
        .p_value;
  };

  std::optional<CVResult> cv;
  if (options.cross_validate && spec.kind != ModelKind::mgwr) {
    cv = kfold_cv(table, make_pipeline(spec), options.k_folds, options.seed);
    row.oos_rmse = cv->oos_rmse;
    row.oos_r2 = cv->oos_r2;
  }

  switch (spec.kind) {
    case ModelKind::ols: {
      const auto fit = linear::ols_fit(standardized(table));
      row.adjusted_r2 = metrics(fit.y, fit.fitted, fit.trS).adjusted_r2;
      row.aicc = fit.aicc;
      row.loocv_r2 = linear::loocv_r2(fit);
      row.moran_p = moran(fit.residuals);
      break;
    }
    case ModelKind::gwr: {
      const auto t = standardized(table);
      row.fixed_adaptive = mode_label(spec.bandwidth ? spec.bandwidth->mode : spec.mode);
      row.bandwidth_selection = spec.bandwidth ? "manual" : criterion_label(spec.criterion);
      row.kernel = title_case(spatial::to_string(spec.kernel));
      const auto bw = spec.bandwidth ? *spec.bandwidth
                                     : linear::select_bandwidth(t, spec.kernel, spec.mode, spec.criterion).bandwidth;
      row.bandwidth = spatial::to_string(bw);
      const auto fit = linear::gwr_fit(t, spec.kernel, bw);
      row.adjusted_r2 = metrics(fit.y, fit.fitted, fit.trS).adjusted_r2;
      row.aicc = fit.aicc;
      row.loocv_r2 = linear::loocv_r2(fit);
      row.moran_p = moran(fit.residuals);
      break;
    }
    case ModelKind::mgwr: {
      linear::MgwrOptions mo;
      mo.kernel = spec.kernel;
      mo.criterion = spec.criterion;
      row.fixed_adaptive = "Adaptive";
      row.bandwidth_selection = criterion_label(spec.criterion);
      row.kernel = title_case(spatial::to_string(spec.kernel));
      const auto fit = linear::mgwr_fit(standardized(table), mo);
      row.adjusted_r2 = metrics(fit.y, fit.fitted, fit.trS).adjusted_r2;
      row.aicc = fit.aicc;
      row.loocv_r2 = linear::loocv_r2(fit);
      row.moran_p = moran(fit.residuals);
      std::string bws;
      for (std::size_t b : fit.bandwidths) bws += (bws.empty() ? "" : ";") + std::to_string(b);
      row.bandwidth = "adaptive:" + bws;
      break;
    }
    case ModelKind::rf:
    case ModelKind::rf_coords:
    case ModelKind::grf: {
      if (spec.kind == ModelKind::grf) {
        row.fixed_adaptive = "Adaptive";
        row.kernel = "Boxcar";
      }
      if (cv) {
        row.moran_p = moran(table.y - cv->predictions);
        if (spec.kind == ModelKind::grf && !cv->fold_results.empty()) row.bandwidth = cv->fold_results[0].bandwidth;
      }
      break;
    }
  }
  return row;
}

std::vector<ComparisonRow> evaluate_models(const data::FeatureTable& table, const std::vector<ModelSpec>& specs,
                                           const EvaluationOptions& options) {
  std::vector<ComparisonRow> rows;
  for (const auto& spec : specs) {
    try {
      rows.push_back(evaluate_model(table, spec, options));
    } catch (const Error& e) {
      ComparisonRow r;
      r.algorithm = std::string(display_name(spec.kind));
      r.error = e.what();
      rows.push_back(r);
    }
  }
  return rows;
}

std::vector<AblationConfig> full_grid(const std::vector<spatial::Kernel>& kernels) {
  std::vector<AblationConfig> out;
  for (auto mode : {spatial::Bandwidth::Mode::fixed, spatial::Bandwidth::Mode::adaptive}) {
    for (auto crit : {linear::Criterion::aicc, linear::Criterion::cv}) {
      for (auto k : kernels) out.push_back({mode, crit, k});
    }
  }
  return out;
}

std::vector<ComparisonRow> ablate(const data::FeatureTable& table, const std::vector<AblationConfig>& grid,
                                  const EvaluationOptions& options) {
  require(!grid.empty(), ErrorCode::invalid_argument, "ablation grid is empty");
  std::vector<ComparisonRow> rows;
  for (const auto& cfg : grid) {
    ModelSpec spec;
    spec.kind = ModelKind::gwr;
    spec.mode = cfg.mode;
    spec.criterion = cfg.criterion;
    spec.kernel = cfg.kernel;
    spec.seed = options.seed;
    try {
      rows.push_back(evaluate_model(table, spec, options));
    } catch (const Error& e) {
      ComparisonRow r;
      r.algorithm = "GWR";
      r.fixed_adaptive = mode_label(cfg.mode);
      r.bandwidth_selection = criterion_label(cfg.criterion);
      r.kernel = title_case(spatial::to_string(cfg.kernel));
      r.error = e.what();
      rows.push_back(r);
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
    if (a.error.empty() != b.error.empty()) return a.error.empty();
    return a.oos_r2.value_or(0.0) < b.oos_r2.value_or(0.0);
  });
  return rows;
}

}  // namespace sdm::diag
