#include "sdm/diagnostics/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sdm/error.hpp"

namespace sdm::diag {

namespace {

std::string fmt(const std::optional<double>& v, int digits) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, *v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Display width counting UTF-8 code points.
std::size_t width(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

}  // namespace

std::vector<std::string> table_header(TableLayout layout) {
  if (layout == TableLayout::models) {
    return {"Algorithm", "Fixed/Adaptive", "Kernel", "Adjusted R²", "AICc", "Out-of-Sample RMSE",
            "Out-of-Sample R²", "LOOCV R²", "Residual Moran's I P-Value"};
  }
  return {"Algorithm", "Fixed/Adaptive", "Bandwidth Selection", "Kernel", "Adjusted R²", "AICc",
          "Out-of-Sample RMSE", "Out-of-Sample R²", "Residual Moran's I P-Value"};
}

std::vector<std::vector<std::string>> table_cells(const std::vector<ComparisonRow>& rows, TableLayout layout) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : rows) {
    std::vector<std::string> cells{r.algorithm, r.fixed_adaptive};
    if (layout == TableLayout::gwr_settings) cells.push_back(r.bandwidth_selection);
    cells.push_back(r.kernel);
    if (!r.error.empty()) {
      cells.push_back("failed: " + r.error);
      while (cells.size() < table_header(layout).size()) cells.emplace_back();
      out.push_back(std::move(cells));
      continue;
    }
    cells.push_back(fmt(r.adjusted_r2, 3));
    cells.push_back(fmt(r.aicc, 2));
    cells.push_back(fmt(r.oos_rmse, 4));
    cells.push_back(fmt(r.oos_r2, 4));
    if (layout == TableLayout::models) cells.push_back(fmt(r.loocv_r2, 4));
    cells.push_back(fmt(r.moran_p, 3));
    out.push_back(std::move(cells));
  }
  return out;
}

void write_table_csv(const std::filesystem::path& path, const std::vector<ComparisonRow>& rows,
                     TableLayout layout) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::io, "cannot write " + path.string());
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_escape(cells[i]);
    out << '\n';
  };
  line(table_header(layout));
  for (const auto& cells : table_cells(rows, layout)) line(cells);
}

std::string format_table_text(const std::vector<ComparisonRow>& rows, TableLayout layout) {
  const auto header = table_header(layout);
  auto cells = table_cells(rows, layout);
  std::vector<std::string> notes;
  for (auto& r : cells) {
    for (auto& c : r) {
      if (c.rfind("failed: ", 0) == 0) {
        notes.push_back(r[0] + ": " + c.substr(8));
        c = "failed";
      }
    }
  }
  std::vector<std::size_t> w(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    w[c] = width(header[c]);
    for (const auto& r : cells) w[c] = std::max(w[c], width(r[c]));
  }
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      os << r[c];
      if (c + 1 < r.size()) os << std::string(w[c] - width(r[c]) + 2, ' ');
    }
    os << '\n';
  };
  line(header);
  for (const auto& r : cells) line(r);
  for (const auto& n : notes) os << "  " << n << '\n';
  return os.str();
}

}  // namespace sdm::diag
