#include "sdm/dataset/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sdm/error.hpp"

namespace sdm::data {

namespace fs = std::filesystem;
using nlohmann::json;

std::string toolkit_version() { return SDM_VERSION_STRING; }

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    fail(ErrorCode::schema_mismatch, "cannot parse '" + text + "' as a number (" + what + ")");
  }
  return v;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::vector<double> parse_list_numbers(const std::string&);

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return j;
  }
  fail(ErrorCode::schema_mismatch, "CSV has no column '" + name + "'");
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::missing_file, "cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::schema_mismatch, path.string() + " is empty");
  for (auto& h : split_csv_line(line)) t.header.push_back(trim(h));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != t.header.size()) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": expected " << t.header.size() << " fields, got "
          << fields.size();
      fail(ErrorCode::schema_mismatch, msg.str());
    }
    t.rows.push_back(std::move(fields));
  }
  return t;
}

void write_csv(const fs::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  auto write_row = [&](const std::vector<std::string>& row) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << quote_if_needed(row[j]);
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& r : table.rows) write_row(r);
}

Manifest Manifest::parse(const std::string& text, fs::path base_dir) {
  Manifest m;
  m.base_ = std::move(base_dir);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::invalid_argument,
           "manifest line " + std::to_string(line_no) + " is not key=value");
    }
    m.values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return m;
}

Manifest Manifest::load(const fs::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::missing_file, "cannot open manifest " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), file.parent_path());
}

std::string Manifest::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorCode::invalid_argument, "manifest lacks key '" + key + "'");
  return it->second;
}

std::string Manifest::get_or(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Manifest::number_or(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : to_double(it->second, key);
}

fs::path Manifest::path(const std::string& key) const {
  fs::path p = get(key);
  return p.is_absolute() ? p : base_ / p;
}

std::map<std::string, std::string> Manifest::with_prefix(const std::string& prefix) const {
  std::map<std::string, std::string> out;
  for (auto it = values_.lower_bound(prefix); it != values_.end(); ++it) {
    if (it->first.compare(0, prefix.size(), prefix) != 0) break;
    out[it->first.substr(prefix.size())] = it->second;
  }
  return out;
}

std::string Manifest::column(const std::string& role) const {
  return get_or("column." + role, role);
}

std::int64_t parse_timestamp(const std::string& raw) {
  const std::string text = trim(raw);
  if (!text.empty() && text.find('-') == std::string::npos) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && ptr == text.data() + text.size()) return v;
  }
  int y = 0, mo = 0, d = 0, hh = 0, mm = 0, ss = 0;
  const int got = std::sscanf(text.c_str(), "%d-%d-%d%*[T ]%d:%d:%d", &y, &mo, &d, &hh, &mm, &ss);
  if (got != 3 && got != 6) fail(ErrorCode::schema_mismatch, "bad timestamp '" + text + "'");
  // days_from_civil (proleptic Gregorian)
  y -= mo <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<std::int64_t>(y - era * 400);
  const std::int64_t doy = (153 * (mo + (mo > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  const std::int64_t days = era * 146097 + doe - 719468;
  return days * 86400 + hh * 3600 + mm * 60 + ss;
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_list_numbers(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) out.push_back(to_double(s, "list"));
  return out;
}

}  // namespace

FusionConfig fusion_config_from(const Manifest& m) {
  FusionConfig cfg;
  cfg.buffer_radius_m = m.number_or("buffer_radius_m", cfg.buffer_radius_m);
  cfg.competitor_radius_m = m.number_or("competitor_radius_m", cfg.competitor_radius_m);
  cfg.census_min_households = static_cast<std::size_t>(
      m.number_or("census_min_households", static_cast<double>(cfg.census_min_households)));
  cfg.census_radius_step_m = m.number_or("census_radius_step_m", cfg.census_radius_step_m);
  cfg.max_trip_duration_h = m.number_or("max_trip_duration_h", cfg.max_trip_duration_h);
  cfg.min_trip_distance_km = m.number_or("min_trip_distance_km", cfg.min_trip_distance_km);
  cfg.max_trip_distance_km = m.number_or("max_trip_distance_km", cfg.max_trip_distance_km);
  for (const auto& [group, raws] : m.with_prefix("poi_category.")) {
    cfg.poi_categories[group] = split_list(raws);
  }
  for (const auto& a : split_list(m.get_or("census_mean", ""))) cfg.census_mean_attributes.insert(a);
  if (m.has("boundary")) {
    const auto coords = parse_list_numbers(m.get("boundary"));
    require(coords.size() >= 6 && coords.size() % 2 == 0, ErrorCode::invalid_argument,
            "boundary must list x,y pairs for at least 3 vertices");
    spatial::Polygon ring;
    for (std::size_t k = 0; k < coords.size(); k += 2) ring.push_back({coords[k], coords[k + 1]});
    cfg.boundary = ring;
  }
  cfg.validate();
  return cfg;
}

std::vector<StationRecord> read_stations(const fs::path& p, const Manifest& m) {
  const auto csv = read_csv(p);
  const auto id = csv.column(m.column("station_id"));
  const auto x = csv.column(m.column("x"));
  const auto y = csv.column(m.column("y"));
  const auto v = csv.column(m.column("vehicles"));
  std::vector<StationRecord> out;
  out.reserve(csv.rows.size());
  for (const auto& r : csv.rows) {
    out.push_back({trim(r[id]), {to_double(r[x], "x"), to_double(r[y], "y")}, to_double(r[v], "vehicles")});
  }
  return out;
}

std::vector<TripRecord> read_trips(const fs::path& p, const Manifest& m) {
  const auto csv = read_csv(p);
  const auto id = csv.column(m.column("station_id"));
  const auto start = csv.column(m.column("start"));
  const auto dur = csv.column(m.column("duration_h"));
  const auto dist = csv.column(m.column("distance_km"));
  const auto kind = csv.column(m.column("kind"));
  std::vector<TripRecord> out;
  out.reserve(csv.rows.size());
  for (const auto& r : csv.rows) {
    out.push_back({trim(r[id]), parse_timestamp(r[start]), to_double(r[dur], "duration_h"),
                   to_double(r[dist], "distance_km"), parse_trip_kind(trim(r[kind]))});
  }
  return out;
}

std::vector<PoiRecord> read_pois(const fs::path& p, const Manifest& m) {
  const auto csv = read_csv(p);
  const auto x = csv.column(m.column("x"));
  const auto y = csv.column(m.column("y"));
  const auto c = csv.column(m.column("category"));
  std::vector<PoiRecord> out;
  out.reserve(csv.rows.size());
  for (const auto& r : csv.rows) {
    out.push_back({{to_double(r[x], "x"), to_double(r[y], "y")}, trim(r[c])});
  }
  return out;
}

AttributeLayer read_attribute_layer(const fs::path& p, const Manifest& m) {
  const auto csv = read_csv(p);
  const auto x = csv.column(m.column("x"));
  const auto y = csv.column(m.column("y"));
  AttributeLayer layer;
  std::vector<std::size_t> attr_cols;
  for (std::size_t j = 0; j < csv.header.size(); ++j) {
    if (j == x || j == y) continue;
    layer.attributes.push_back(csv.header[j]);
    attr_cols.push_back(j);
  }
  for (const auto& r : csv.rows) {
    layer.points.push_back({to_double(r[x], "x"), to_double(r[y], "y")});
    std::vector<double> vals;
    vals.reserve(attr_cols.size());
    for (auto j : attr_cols) vals.push_back(to_double(r[j], csv.header[j]));
    layer.values.push_back(std::move(vals));
  }
  return layer;
}

void write_stations(const fs::path& p, const std::vector<StationRecord>& stations) {
  CsvTable t;
  t.header = {"station_id", "x", "y", "vehicles"};
  for (const auto& s : stations) {
    t.rows.push_back({s.station_id, format_double(s.location.x), format_double(s.location.y),
                      format_double(s.vehicles)});
  }
  write_csv(p, t);
}

void write_trips(const fs::path& p, const std::vector<TripRecord>& trips) {
  CsvTable t;
  t.header = {"station_id", "start", "duration_h", "distance_km", "kind"};
  for (const auto& r : trips) {
    t.rows.push_back({r.station_id, std::to_string(r.start_time), format_double(r.duration_h),
                      format_double(r.distance_km), to_string(r.kind)});
  }
  write_csv(p, t);
}

void write_pois(const fs::path& p, const std::vector<PoiRecord>& pois) {
  CsvTable t;
  t.header = {"x", "y", "category"};
  for (const auto& r : pois) {
    t.rows.push_back({format_double(r.location.x), format_double(r.location.y), r.category});
  }
  write_csv(p, t);
}

void write_attribute_layer(const fs::path& p, const AttributeLayer& layer) {
  CsvTable t;
  t.header = {"x", "y"};
  for (const auto& a : layer.attributes) t.header.push_back(a);
  for (std::size_t k = 0; k < layer.size(); ++k) {
    std::vector<std::string> row = {format_double(layer.points[k].x), format_double(layer.points[k].y)};
    for (double v : layer.values[k]) row.push_back(format_double(v));
    t.rows.push_back(std::move(row));
  }
  write_csv(p, t);
}

void write_feature_table(const fs::path& path, const FeatureTable& table, const TableMetadata& meta) {
  table.validate();
  CsvTable t;
  t.header = {"station_id", "x", "y"};
  for (const auto& c : table.columns) t.header.push_back(c.name);
  t.header.push_back(table.target.name);
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    std::vector<std::string> row = {table.station_ids[i], format_double(table.locations[i].x),
                                    format_double(table.locations[i].y)};
    for (Eigen::Index j = 0; j < table.X.cols(); ++j) row.push_back(format_double(table.X(r, j)));
    row.push_back(format_double(table.y(r)));
    t.rows.push_back(std::move(row));
  }
  write_csv(path, t);

  json j;
  j["toolkit_version"] = toolkit_version();
  j["columns"] = json::array();
  for (const auto& c : table.columns) {
    j["columns"].push_back({{"name", c.name}, {"unit", c.unit}, {"provenance", c.provenance}});
  }
  j["target"] = {{"name", table.target.name}, {"unit", table.target.unit},
                 {"provenance", table.target.provenance}};
  if (table.standardization) {
    const auto& s = *table.standardization;
    j["standardization"] = {
        {"x_mean", std::vector<double>(s.x_mean.data(), s.x_mean.data() + s.x_mean.size())},
        {"x_std", std::vector<double>(s.x_std.data(), s.x_std.data() + s.x_std.size())},
        {"y_mean", s.y_mean},
        {"y_std", s.y_std},
        {"convention", "population std (n denominator); applied to X and y"}};
  }
  j["fusion_fingerprint"] = meta.fusion_fingerprint;
  j["default_voronoi_boundary"] = meta.default_voronoi_boundary;
  std::ofstream out(path.string() + ".meta.json");
  if (!out) fail(ErrorCode::io, "cannot write table metadata for " + path.string());
  out << j.dump(2) << '\n';
}

FeatureTable read_feature_table(const fs::path& path, TableMetadata* meta) {
  const auto csv = read_csv(path);
  require(csv.header.size() >= 4 && csv.header[0] == "station_id" && csv.header[1] == "x" &&
              csv.header[2] == "y",
          ErrorCode::schema_mismatch,
          path.string() + " is not a feature table (expected station_id,x,y,...,target)");
  FeatureTable t;
  const std::size_t p = csv.header.size() - 4;
  for (std::size_t j = 0; j < p; ++j) t.columns.push_back({csv.header[3 + j], "", ""});
  t.target.name = csv.header.back();
  const auto n = static_cast<Eigen::Index>(csv.rows.size());
  t.X.resize(n, static_cast<Eigen::Index>(p));
  t.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = csv.rows[static_cast<std::size_t>(i)];
    t.station_ids.push_back(r[0]);
    t.locations.push_back({to_double(r[1], "x"), to_double(r[2], "y")});
    for (std::size_t j = 0; j < p; ++j) t.X(i, static_cast<Eigen::Index>(j)) = to_double(r[3 + j], csv.header[3 + j]);
    t.y(i) = to_double(r.back(), t.target.name);
  }

  const fs::path meta_path = path.string() + ".meta.json";
  if (fs::exists(meta_path)) {
    std::ifstream in(meta_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      fail(ErrorCode::schema_mismatch, "bad table metadata: " + std::string(e.what()));
    }
    const auto& cols = j.at("columns");
    require(cols.size() == p, ErrorCode::schema_mismatch, "metadata column count mismatch");
    for (std::size_t k = 0; k < p; ++k) {
      require(cols[k].at("name").get<std::string>() == t.columns[k].name, ErrorCode::schema_mismatch,
              "metadata column order does not match CSV");
      t.columns[k].unit = cols[k].value("unit", "");
      t.columns[k].provenance = cols[k].value("provenance", "");
    }
    if (j.contains("target")) {
      t.target.unit = j["target"].value("unit", "");
      t.target.provenance = j["target"].value("provenance", "");
    }
    if (j.contains("standardization")) {
      const auto& s = j["standardization"];
      Standardization st;
      const auto xm = s.at("x_mean").get<std::vector<double>>();
      const auto xs = s.at("x_std").get<std::vector<double>>();
      require(xm.size() == p && xs.size() == p, ErrorCode::schema_mismatch,
              "standardization width mismatch");
      st.x_mean = Eigen::Map<const Eigen::VectorXd>(xm.data(), static_cast<Eigen::Index>(p));
      st.x_std = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(p));
      st.y_mean = s.at("y_mean").get<double>();
      st.y_std = s.at("y_std").get<double>();
      t.standardization = st;
    }
    if (meta) {
      meta->fusion_fingerprint = j.value("fusion_fingerprint", "");
      meta->default_voronoi_boundary = j.value("default_voronoi_boundary", false);
    }
  }
  t.validate();
  return t;
}

}  // namespace sdm::data
