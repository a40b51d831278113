#pragma once

#include "safetydash/dates.hpp"
#include "safetydash/geo.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace safetydash {

enum class CrimeCategory { drugs_alcohol, sex_crime, theft, violent, other };

inline constexpr CrimeCategory kAllCategories[] = {CrimeCategory::drugs_alcohol, CrimeCategory::sex_crime,
                                                   CrimeCategory::theft, CrimeCategory::violent,
                                                   CrimeCategory::other};

std::string_view to_string(CrimeCategory c);
std::optional<CrimeCategory> parse_category(std::string_view text);

struct CrimeRecord {
  std::string id;
  Date report_date;
  DateTime occurrence_at;
  std::string address;
  std::string ucr_code;
  CrimeCategory category = CrimeCategory::other;
  std::optional<GeoPoint> location;
  std::optional<std::string> npu;
  std::optional<std::string> neighborhood;

  friend bool operator==(const CrimeRecord&, const CrimeRecord&) = default;
};

struct CodeViolationRecord {
  std::string id;
  Date report_date;
  std::optional<Date> last_inspection_date;
  std::string address;
  std::string status;
  bool open_and_vacant = false;
  bool overgrowth = false;
  bool active_utilities = false;
  std::optional<GeoPoint> location;
  std::optional<std::string> npu;
  std::optional<std::string> neighborhood;

  friend bool operator==(const CodeViolationRecord&, const CodeViolationRecord&) = default;
};

enum class AssetKind { school, religious, park, transit_stop };

std::string_view to_string(AssetKind k);
std::optional<AssetKind> parse_asset_kind(std::string_view text);

// Insertion-ordered key/value pairs shown on hover.
using Details = std::vector<std::pair<std::string, std::string>>;

struct Asset {
  std::string id;
  AssetKind kind = AssetKind::school;
  std::string name;
  GeoPoint location;
  Details details;

  friend bool operator==(const Asset&, const Asset&) = default;
};

struct CensusProfile {
  std::string region_id;
  RegionKind region_kind = RegionKind::neighborhood;
  long long population = 0;
  std::map<std::string, double> factors;  // absent key = missing value

  friend bool operator==(const CensusProfile&, const CensusProfile&) = default;
};

struct RowError {
  std::size_t row = 0;  // physical line number in the source file
  std::string reason;
};

// Round to 9 significant digits; the persisted precision of every float.
double canonical(double v);
GeoPoint canonical(const GeoPoint& p);

}  // namespace safetydash
