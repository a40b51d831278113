#pragma once

#include "safetydash/geo.hpp"
#include "safetydash/ingest.hpp"
#include "safetydash/records.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace safetydash {

inline constexpr int kSnapshotFormatVersion = 1;

struct DatasetReport {
  std::size_t parsed = 0;          // records kept
  std::size_t row_errors = 0;      // rows rejected
  std::size_t located = 0;         // records with a location after geocoding
  std::size_t geocoded = 0;        // locations filled by the geocoder
  std::size_t geocode_failed = 0;  // records still without a location
  std::size_t unjoined = 0;        // located records outside every NPU
  std::size_t coerced = 0;         // unknown UCR codes / unknown flag values

  bool reconciles() const { return parsed == located + geocode_failed && geocoded <= located && unjoined <= located; }

  friend bool operator==(const DatasetReport&, const DatasetReport&) = default;
};

struct IngestReport {
  DatasetReport crimes;
  DatasetReport violations;
  DatasetReport assets;
  DatasetReport census;

  friend bool operator==(const IngestReport&, const IngestReport&) = default;
};

struct SnapshotInputs {
  std::vector<CrimeRecord> crimes;
  std::vector<CodeViolationRecord> violations;
  std::vector<Asset> assets;
  CensusTable census;
  std::vector<GeoRegion> regions;
  // Counts only the builder cannot see: rejected rows, geocoder hits, coercions.
  IngestReport partial;
};

// The fully joined, read-only dataset every query runs against. There are no
// mutators; a rebuild yields a new value with a new identity.
class DataSnapshot {
 public:
  const std::vector<CrimeRecord>& crimes() const { return crimes_; }
  const std::vector<CodeViolationRecord>& violations() const { return violations_; }
  const std::vector<Asset>& assets() const { return assets_; }
  const std::vector<CensusProfile>& census() const { return census_; }
  const std::vector<std::string>& census_factors() const { return factor_names_; }
  const std::vector<GeoRegion>& regions() const { return regions_; }
  const std::string& built_at() const { return built_at_; }
  const IngestReport& report() const { return report_; }

  // Distinguishes snapshot values for caches; copies share it.
  std::uint64_t identity() const { return identity_; }

  const GeoRegion* find_region(RegionKind kind, const std::string& id) const;
  const std::vector<std::string>& region_ids(RegionKind kind) const;
  const CensusProfile* census_for(RegionKind kind, const std::string& id) const;

  /// Census population, falling back to the boundary file; nullopt when 0/unknown.
  std::optional<long long> population(RegionKind kind, const std::string& id) const;

  /// NPU containing an interior point of the neighborhood polygon.
  std::optional<std::string> npu_of_neighborhood(const std::string& id) const;

  /// Bounds of all regions, else of all located records; nullopt when empty.
  std::optional<BBox> extent() const;

  /// Field-by-field equality, ignoring built_at and identity.
  bool same_content(const DataSnapshot& other) const;

 private:
  friend DataSnapshot build_snapshot(SnapshotInputs inputs, std::string built_at);
  friend DataSnapshot snapshot_from_json(const nlohmann::ordered_json& doc);

  DataSnapshot() = default;
  void index();

  std::vector<CrimeRecord> crimes_;
  std::vector<CodeViolationRecord> violations_;
  std::vector<Asset> assets_;
  std::vector<CensusProfile> census_;
  std::vector<std::string> factor_names_;
  std::vector<GeoRegion> regions_;
  std::string built_at_;
  IngestReport report_;
  std::uint64_t identity_ = 0;

  std::map<std::pair<RegionKind, std::string>, std::size_t> region_index_;
  std::map<std::pair<RegionKind, std::string>, std::size_t> census_index_;
  std::map<RegionKind, std::vector<std::string>> ids_by_kind_;
  std::map<std::string, std::string> neighborhood_npu_;
};

std::string utc_now_iso();

/// Validates the regions, joins every located record against them, checks
/// that census rows reference known regions (ReferentialError otherwise), and
/// tallies the report.
DataSnapshot build_snapshot(SnapshotInputs inputs, std::string built_at = utc_now_iso());

nlohmann::ordered_json snapshot_to_json(const DataSnapshot& snap);
DataSnapshot snapshot_from_json(const nlohmann::ordered_json& doc);

/// Single-file JSON, format_version 1. Keys are emitted in a fixed order so
/// identical snapshots serialize to identical bytes apart from built_at.
void save_snapshot(const DataSnapshot& snap, const std::string& path);
std::string serialize_snapshot(const DataSnapshot& snap);

/// Throws FormatError for unreadable, corrupt, or wrong-version files.
DataSnapshot load_snapshot(const std::string& path);
DataSnapshot parse_snapshot(std::string_view text);

}  // namespace safetydash
