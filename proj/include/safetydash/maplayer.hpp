#pragma once

#include "safetydash/hexgrid.hpp"
#include "safetydash/records.hpp"
#include "safetydash/snapshot.hpp"

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace safetydash {

/// One of five logarithmic classes: 1 | 2-10 | 11-100 | 101-1000 | 1001+.
/// Throws DomainError(bad_param) for count < 1.
int color_class(long long count);

struct Span {
  enum class Kind { all, year, month };
  Kind kind = Kind::all;
  int year = 0;
  unsigned month = 0;

  bool contains(Date d) const;
  std::string label() const;

  friend bool operator==(const Span&, const Span&) = default;
};

/// "" | "all" | "YYYY" | "YYYY-MM". Throws DomainError(bad_span).
Span parse_span(std::string_view text);

struct CrimeFilter {
  std::optional<std::set<CrimeCategory>> categories;
  std::optional<std::set<std::string>> ucr_codes;
  Span span;

  bool matches(const CrimeRecord& c) const;
  /// Stable textual form, used as a cache key.
  std::string key() const;

  friend bool operator==(const CrimeFilter&, const CrimeFilter&) = default;
};

/// Throws DomainError(bad_filter) when both categories and UCR codes are set.
void validate(const CrimeFilter& f);

/// Comma-separated lists as they arrive from query strings. Throws
/// DomainError(bad_category / bad_filter / bad_span).
CrimeFilter parse_crime_filter(std::string_view span, std::string_view categories, std::string_view ucr);

std::vector<CrimeRecord> filter_crimes(const DataSnapshot& snap, const CrimeFilter& f);

struct HexCell {
  HexCoord coord;
  long long count = 0;
  int color_class = 1;

  friend bool operator==(const HexCell&, const HexCell&) = default;
};

/// Grid anchored at the center of the snapshot extent (0,0 when empty).
HexGridConfig default_grid(const DataSnapshot& snap, double hex_size_m = kDefaultHexSizeM);

/// Filtered, located crimes binned into hexes; zero cells omitted; sorted by (q, r).
std::vector<HexCell> build_hexmap(const DataSnapshot& snap, const CrimeFilter& f, const HexGridConfig& cfg);

struct PinPoint {
  std::string id;
  GeoPoint location;
};

struct PinCluster {
  GeoPoint centroid;
  long long count = 0;
  std::vector<std::string> member_ids;  // filled only when count <= kMaxListedMembers

  friend bool operator==(const PinCluster&, const PinCluster&) = default;
};

inline constexpr long long kMaxListedMembers = 100;
inline constexpr double kDefaultClusterCellFactor = 1.0 / 8.0;

/// Side of the square clustering cell in degrees at a zoom level.
double cluster_cell_deg(int zoom, double cell_factor = kDefaultClusterCellFactor);

/// Grid clustering: square cells of cluster_cell_deg(zoom); one cluster per
/// occupied cell at its members' centroid. Ordered by cell (lon index, lat
/// index). Throws DomainError(bad_zoom) outside [0, 22].
std::vector<PinCluster> cluster_pins(std::span<const PinPoint> points, int zoom,
                                     double cell_factor = kDefaultClusterCellFactor);

/// Located violations whose report date falls in the span, clustered.
std::vector<PinCluster> violation_pins(const DataSnapshot& snap, const Span& span, int zoom,
                                       double cell_factor = kDefaultClusterCellFactor);

std::vector<Asset> asset_pins(const DataSnapshot& snap, const std::optional<std::set<AssetKind>>& kinds);

/// Throws DomainError(bad_kind).
std::optional<std::set<AssetKind>> parse_asset_kinds(std::string_view csv);

// Memoizes build_hexmap per (snapshot identity, filter, grid). Safe for
// concurrent lookups and inserts; entries for another snapshot never match.
class HexmapCache {
 public:
  explicit HexmapCache(std::size_t max_entries = 256) : max_entries_(max_entries) {}

  std::shared_ptr<const std::vector<HexCell>> get(const DataSnapshot& snap, const CrimeFilter& f,
                                                  const HexGridConfig& cfg);
  std::size_t size() const;
  std::size_t hits() const;

 private:
  static std::string key(const DataSnapshot& snap, const CrimeFilter& f, const HexGridConfig& cfg);

  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<const std::vector<HexCell>>> entries_;
  std::size_t max_entries_;
  std::atomic<std::size_t> hits_{0};
};

}  // namespace safetydash
