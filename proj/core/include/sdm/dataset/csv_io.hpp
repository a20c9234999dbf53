#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sdm/dataset/feature_table.hpp"
#include "sdm/dataset/fusion.hpp"
#include "sdm/dataset/records.hpp"

namespace sdm::data {

/// Minimal CSV: comma separated, optional double quotes, header row required.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws schema_mismatch
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// key=value lines; '#' starts a comment. Relative file values resolve
/// against the manifest's directory via Manifest::path().
class Manifest {
 public:
  static Manifest load(const std::filesystem::path& file);
  static Manifest parse(const std::string& text, std::filesystem::path base_dir = {});

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double number_or(const std::string& key, double fallback) const;
  std::filesystem::path path(const std::string& key) const;
  /// Keys beginning with prefix, with the prefix stripped.
  std::map<std::string, std::string> with_prefix(const std::string& prefix) const;
  /// CSV header for a role, honouring "column.<role>=<header>" overrides.
  std::string column(const std::string& role) const;

  const std::filesystem::path& base_dir() const { return base_; }

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_;
};

/// Unix seconds from "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS" or a bare integer.
std::int64_t parse_timestamp(const std::string& text);

FusionConfig fusion_config_from(const Manifest& m);

std::vector<StationRecord> read_stations(const std::filesystem::path& p, const Manifest& m);
std::vector<TripRecord> read_trips(const std::filesystem::path& p, const Manifest& m);
std::vector<PoiRecord> read_pois(const std::filesystem::path& p, const Manifest& m);
/// Every column other than x / y becomes a numeric attribute.
AttributeLayer read_attribute_layer(const std::filesystem::path& p, const Manifest& m);

void write_stations(const std::filesystem::path& p, const std::vector<StationRecord>& s);
void write_trips(const std::filesystem::path& p, const std::vector<TripRecord>& t);
void write_pois(const std::filesystem::path& p, const std::vector<PoiRecord>& pois);
void write_attribute_layer(const std::filesystem::path& p, const AttributeLayer& layer);

/// Extra sidecar entries recorded next to a persisted FeatureTable.
struct TableMetadata {
  std::string fusion_fingerprint;
  bool default_voronoi_boundary = false;
};

/// CSV (station_id, x, y, features..., target) plus "<path>.meta.json".
void write_feature_table(const std::filesystem::path& path, const FeatureTable& table,
                         const TableMetadata& meta = {});
FeatureTable read_feature_table(const std::filesystem::path& path, TableMetadata* meta = nullptr);

std::string toolkit_version();

}  // namespace sdm::data
