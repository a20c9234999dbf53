#include "sdm/selection/select.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "sdm/dataset/folds.hpp"
#include "sdm/error.hpp"
#include "sdm/parallel.hpp"

namespace sdm::selection {

std::string_view to_string(SelectedBy s) {
  switch (s) {
    case SelectedBy::lasso: return "lasso";
    case SelectedBy::manual: return "manual";
    case SelectedBy::not_selected: return "not_selected";
    case SelectedBy::removed_collinear: return "removed_collinear";
  }
  return "unknown";
}

std::string_view display_label(SelectedBy s) {
  switch (s) {
    case SelectedBy::lasso: return "LASSO";
    case SelectedBy::manual: return "Manually";
    default: return "Not selected";
  }
}

std::vector<std::string> SelectionResult::selected() const {
  std::vector<std::string> out;
  for (const auto& d : decisions) {
    if (d.selected_by == SelectedBy::lasso || d.selected_by == SelectedBy::manual) {
      out.push_back(d.feature);
    }
  }
  return out;
}

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& M, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), M.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = M.row(rows[r]);
  return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& v, const std::vector<std::size_t>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out(static_cast<Eigen::Index>(r)) = v(rows[r]);
  return out;
}

}  // namespace

SelectionResult lasso_select(const data::FeatureTable& table, const SelectionOptions& options) {
  table.validate();
  require(table.standardization.has_value(), ErrorCode::invalid_argument,
          "feature selection expects a standardized table");
  for (const auto& name : options.manual_include) {
    require(table.find_column(name).has_value(), ErrorCode::schema_mismatch,
            "manual include '" + name + "' is not a column of the table");
  }
  for (const auto& name : options.manual_exclude) {
    require(table.find_column(name).has_value(), ErrorCode::schema_mismatch,
            "manual exclude '" + name + "' is not a column of the table");
  }

  SelectionResult result;
  const double lmax = lambda_max(table.X, table.y);
  require(lmax > 0, ErrorCode::numerical, "lambda_max is zero: target is uncorrelated with every feature");
  result.lambdas = lambda_grid(lmax, options.path_length, options.path_ratio);

  const auto folds = data::make_folds(table.rows(), options.k_folds, options.seed);
  std::vector<std::vector<double>> fold_mse(folds.size());
  parallel_for(folds.size(), [&](std::size_t f) {
    const auto train = data::training_rows(folds, f);
    const Eigen::MatrixXd Xt = take_rows(table.X, train);
    const Eigen::VectorXd yt = take_rows(table.y, train);
    const Eigen::MatrixXd Xv = take_rows(table.X, folds[f]);
    const Eigen::VectorXd yv = take_rows(table.y, folds[f]);
    const auto path = lasso_path(Xt, yt, result.lambdas, options.lasso);
    fold_mse[f].resize(path.size());
    for (std::size_t l = 0; l < path.size(); ++l) {
      const Eigen::VectorXd pred =
          (Xv * path[l].coefficients).array() + path[l].intercept;
      fold_mse[f][l] = (yv - pred).squaredNorm() / static_cast<double>(yv.size());
    }
  });

  result.cv_mse.assign(result.lambdas.size(), 0.0);
  std::size_t best = 0;
  for (std::size_t l = 0; l < result.lambdas.size(); ++l) {
    for (const auto& f : fold_mse) result.cv_mse[l] += f[l];
    result.cv_mse[l] /= static_cast<double>(folds.size());
    if (result.cv_mse[l] < result.cv_mse[best]) best = l;
  }
  result.lambda = result.lambdas[best];

  // Refit the full path so the chosen solution matches the warm-started CV runs.
  const auto path = lasso_path(table.X, table.y,
                               std::vector<double>(result.lambdas.begin(),
                                                   result.lambdas.begin() + static_cast<std::ptrdiff_t>(best) + 1),
                               options.lasso);
  const LassoFit& chosen = path.back();

  const std::set<std::string> include(options.manual_include.begin(), options.manual_include.end());
  const std::set<std::string> exclude(options.manual_exclude.begin(), options.manual_exclude.end());
  const auto names = table.column_names();
  for (std::size_t j = 0; j < names.size(); ++j) {
    FeatureDecision d;
    d.feature = names[j];
    d.coefficient = chosen.coefficients(static_cast<Eigen::Index>(j));
    d.max_vif = std::numeric_limits<double>::quiet_NaN();
    if (exclude.count(names[j])) {
      d.selected_by = SelectedBy::not_selected;
    } else if (d.coefficient != 0.0) {
      d.selected_by = SelectedBy::lasso;
    } else if (include.count(names[j])) {
      d.selected_by = SelectedBy::manual;
    }
    result.decisions.push_back(d);
  }
  return result;
}

std::vector<std::string> lasso_select(const data::FeatureTable& table, std::size_t k_folds,
                                      std::uint64_t seed,
                                      const std::vector<std::string>& manual_include,
                                      const std::vector<std::string>& manual_exclude) {
  SelectionOptions options;
  options.k_folds = k_folds;
  options.seed = seed;
  options.manual_include = manual_include;
  options.manual_exclude = manual_exclude;
  return lasso_select(table, options).selected();
}

void screen_collinearity(const data::FeatureTable& table, SelectionResult& result,
                         spatial::Kernel kernel, const spatial::Bandwidth& bandwidth,
                         const CollinearityThresholds& thresholds) {
  for (;;) {
    const auto names = result.selected();
    if (names.size() < 2) return;
    const auto report = local_collinearity(table.select_columns(names), kernel, bandwidth, thresholds);
    for (std::size_t j = 0; j < names.size(); ++j) {
      for (auto& d : result.decisions) {
        if (d.feature == names[j]) d.max_vif = report.max_vif(j);
      }
    }
    FeatureDecision* victim = nullptr;
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (!report.flagged_mask[j]) continue;
      for (auto& d : result.decisions) {
        if (d.feature != names[j] || d.selected_by != SelectedBy::lasso) continue;
        if (!victim || std::abs(d.coefficient) < std::abs(victim->coefficient)) victim = &d;
      }
    }
    if (!victim) return;
    victim->selected_by = SelectedBy::removed_collinear;
  }
}

void write_selection_report(const std::filesystem::path& path, const SelectionResult& result) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::io, "cannot write selection report " + path.string());
  out.precision(17);
  out << "feature,selected_by,max_local_vif,lambda\n";
  for (const auto& d : result.decisions) {
    out << d.feature << ',' << to_string(d.selected_by) << ',';
    if (std::isnan(d.max_vif)) {
      out << "";
    } else if (std::isinf(d.max_vif)) {
      out << "inf";
    } else {
      out << d.max_vif;
    }
    out << ',' << result.lambda << '\n';
  }
}

}  // namespace sdm::selection
