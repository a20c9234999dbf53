#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sdm::diag {

/// One line of a model comparison table. Absent metrics print as blanks.
struct ComparisonRow {
  std::string algorithm;
  std::string fixed_adaptive;
  std::string bandwidth_selection;
  std::string kernel;
  std::optional<double> adjusted_r2;
  std::optional<double> aicc;
  std::optional<double> oos_rmse;
  std::optional<double> oos_r2;
  std::optional<double> loocv_r2;
  std::optional<double> moran_p;
  std::string bandwidth;  // resolved setting, informational
  std::string error;      // non-empty when the configuration failed
};

enum class TableLayout {
  models,       // Algorithm, Fixed/Adaptive, Kernel, ..., LOOCV R², Moran p
  gwr_settings  // adds Bandwidth Selection, drops LOOCV R²
};

std::vector<std::string> table_header(TableLayout layout);
std::vector<std::vector<std::string>> table_cells(const std::vector<ComparisonRow>& rows, TableLayout layout);

void write_table_csv(const std::filesystem::path& path, const std::vector<ComparisonRow>& rows,
                     TableLayout layout);
/// Column-aligned plain text with the same header as the CSV.
std::string format_table_text(const std::vector<ComparisonRow>& rows, TableLayout layout);

}  // namespace sdm::diag
