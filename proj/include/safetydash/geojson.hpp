#pragma once

#include "safetydash/geo.hpp"

#include "json.hpp"

#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace safetydash {

using Json = nlohmann::ordered_json;

/// FeatureCollection of Polygon / MultiPolygon features with properties
/// {id, kind, name, population}. Coordinates are [lon, lat]. Throws
/// FormatError for structural problems and ValidationError for bad geometry.
std::vector<GeoRegion> load_regions(std::istream& in);
std::vector<GeoRegion> load_regions_file(const std::string& path);

Json point_coords(const GeoPoint& p);  // [lon, lat]
Json ring_coords(const Ring& ring);
Json region_geometry(const GeoRegion& region);
Json region_feature(const GeoRegion& region);
Json regions_collection(std::span<const GeoRegion> regions, std::optional<RegionKind> kind = std::nullopt);

}  // namespace safetydash
