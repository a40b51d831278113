#include "safetydash/records.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace safetydash {

std::string_view to_string(CrimeCategory c)
{
  switch (c) {
    case CrimeCategory::drugs_alcohol: return "drugs_alcohol";
    case CrimeCategory::sex_crime: return "sex_crime";
    case CrimeCategory::theft: return "theft";
    case CrimeCategory::violent: return "violent";
    case CrimeCategory::other: return "other";
  }
  return "other";
}

std::optional<CrimeCategory> parse_category(std::string_view text)
{
  for (auto c : kAllCategories) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::string_view to_string(AssetKind k)
{
  switch (k) {
    case AssetKind::school: return "school";
    case AssetKind::religious: return "religious";
    case AssetKind::park: return "park";
    case AssetKind::transit_stop: return "transit_stop";
  }
  return "school";
}

std::optional<AssetKind> parse_asset_kind(std::string_view text)
{
  for (auto k : {AssetKind::school, AssetKind::religious, AssetKind::park, AssetKind::transit_stop}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

double canonical(double v)
{
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

GeoPoint canonical(const GeoPoint& p) { return {canonical(p.lat), canonical(p.lon)}; }

}  // namespace safetydash
