#pragma once

#include "safetydash/geo.hpp"
#include "safetydash/geocoder.hpp"
#include "safetydash/records.hpp"
#include "safetydash/ucr.hpp"

#include <istream>
#include <span>
#include <string>
#include <vector>

namespace safetydash {

template <class T>
struct Parsed {
  std::vector<T> records;
  std::vector<RowError> errors;
  // Values silently coerced: unknown UCR codes (crimes), unrecognized flag
  // values (violations). The record is kept either way.
  std::size_t coerced = 0;
};

struct CensusTable {
  std::vector<std::string> factor_names;  // column order from the source
  std::vector<CensusProfile> profiles;
  std::vector<RowError> errors;
};

// Each parser throws SchemaError when a required column is missing from the
// header; every other problem becomes a RowError and parsing continues.
Parsed<CrimeRecord> parse_crimes(std::istream& in, const UcrTable& ucr);
Parsed<CodeViolationRecord> parse_violations(std::istream& in);
Parsed<Asset> parse_assets(std::istream& in);
CensusTable parse_census(std::istream& in);

/// Y / YES / TRUE (any case) -> true. Sets `known` false for values outside
/// the recognized true/false spellings.
bool parse_flag(std::string_view text, bool& known);

struct GeocodeStats {
  std::size_t geocoded = 0;
  std::size_t failed = 0;
};

/// Offers only location-less records to the geocoder, in input order.
template <class Record>
GeocodeStats geocode_missing(std::vector<Record>& records, Geocoder& geocoder)
{
  GeocodeStats stats;
  for (auto& rec : records) {
    if (rec.location) continue;
    auto p = geocoder.geocode(rec.address);
    if (p && is_valid(*p)) {
      rec.location = canonical(*p);
      ++stats.geocoded;
    } else {
      ++stats.failed;
    }
  }
  return stats;
}

// Prefiltered NPU + neighborhood lookup. Holds pointers into `regions`, which
// must outlive it.
class RegionJoiner {
 public:
  explicit RegionJoiner(std::span<const GeoRegion> regions)
      : npu_(regions, RegionKind::npu), neighborhood_(regions, RegionKind::neighborhood)
  {
  }

  std::optional<std::string> npu(const GeoPoint& p) const { return npu_.assign(p); }
  std::optional<std::string> neighborhood(const GeoPoint& p) const { return neighborhood_.assign(p); }

 private:
  RegionIndex npu_;
  RegionIndex neighborhood_;
};

/// Tags every located record with its NPU and neighborhood; returns how many
/// located records fell outside every NPU.
template <class Record>
std::size_t spatial_join(std::vector<Record>& records, const RegionJoiner& joiner)
{
  std::size_t unjoined = 0;
  for (auto& rec : records) {
    if (!rec.location) continue;
    rec.npu = joiner.npu(*rec.location);
    rec.neighborhood = joiner.neighborhood(*rec.location);
    if (!rec.npu) ++unjoined;
  }
  return unjoined;
}

template <class Record>
std::size_t spatial_join(std::vector<Record>& records, std::span<const GeoRegion> regions)
{
  return spatial_join(records, RegionJoiner(regions));
}

}  // namespace safetydash
