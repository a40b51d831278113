#include "safetydash/geojson.hpp"

#include "safetydash/error.hpp"
#include "safetydash/records.hpp"

#include <fstream>

namespace safetydash {

namespace {

GeoPoint read_position(const Json& pos)
{
  if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
    throw FormatError("geojson: position must be [lon, lat]");
  }
  return canonical(GeoPoint{pos[1].get<double>(), pos[0].get<double>()});
}

std::vector<Ring> read_polygon(const Json& rings)
{
  if (!rings.is_array()) throw FormatError("geojson: polygon coordinates must be an array of rings");
  std::vector<Ring> out;
  for (const auto& ring : rings) {
    if (!ring.is_array()) throw FormatError("geojson: ring must be an array of positions");
    Ring r;
    for (const auto& pos : ring) r.push_back(read_position(pos));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<GeoRegion> load_regions(std::istream& in)
{
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("geojson: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array()) {
    throw FormatError("geojson: expected a FeatureCollection");
  }

  std::vector<GeoRegion> regions;
  for (const auto& f : doc["features"]) {
    if (!f.is_object() || !f.contains("geometry") || !f["geometry"].is_object()) {
      throw FormatError("geojson: feature without geometry");
    }
    const Json props = f.value("properties", Json::object());
    GeoRegion r;
    if (!props.contains("id") || !props["id"].is_string()) throw FormatError("geojson: feature without string id");
    r.id = props["id"].get<std::string>();
    auto kind = parse_region_kind(props.value("kind", ""));
    if (!kind) throw FormatError("geojson: feature '" + r.id + "' has unknown kind");
    r.kind = *kind;
    r.name = props.contains("name") && props["name"].is_string() ? props["name"].get<std::string>() : r.id;
    if (props.contains("population") && !props["population"].is_null()) {
      if (!props["population"].is_number()) throw FormatError("geojson: population of '" + r.id + "' not numeric");
      r.population = props["population"].get<long long>();
    }

    const Json& geom = f["geometry"];
    const std::string type = geom.value("type", "");
    if (!geom.contains("coordinates")) throw FormatError("geojson: geometry of '" + r.id + "' has no coordinates");
    if (type == "Polygon") {
      r.polygons.push_back(read_polygon(geom["coordinates"]));
    } else if (type == "MultiPolygon") {
      if (!geom["coordinates"].is_array()) throw FormatError("geojson: bad MultiPolygon for '" + r.id + "'");
      for (const auto& poly : geom["coordinates"]) r.polygons.push_back(read_polygon(poly));
    } else {
      throw FormatError("geojson: feature '" + r.id + "' must be Polygon or MultiPolygon, got '" + type + "'");
    }
    regions.push_back(std::move(r));
  }
  validate(std::span<const GeoRegion>(regions));
  return regions;
}

std::vector<GeoRegion> load_regions_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read regions file '" + path + "'");
  return load_regions(in);
}

Json point_coords(const GeoPoint& p) { return Json::array({p.lon, p.lat}); }

Json ring_coords(const Ring& ring)
{
  Json out = Json::array();
  for (const auto& p : ring) out.push_back(point_coords(p));
  return out;
}

Json region_geometry(const GeoRegion& region)
{
  auto poly_coords = [](const std::vector<Ring>& poly) {
    Json rings = Json::array();
    for (const auto& ring : poly) rings.push_back(ring_coords(ring));
    return rings;
  };
  if (region.polygons.size() == 1) {
    return Json{{"type", "Polygon"}, {"coordinates", poly_coords(region.polygons.front())}};
  }
  Json polys = Json::array();
  for (const auto& poly : region.polygons) polys.push_back(poly_coords(poly));
  return Json{{"type", "MultiPolygon"}, {"coordinates", polys}};
}

Json region_feature(const GeoRegion& region)
{
  return Json{{"type", "Feature"},
              {"properties",
               {{"id", region.id},
                {"kind", to_string(region.kind)},
                {"name", region.name},
                {"population", region.population}}},
              {"geometry", region_geometry(region)}};
}

Json regions_collection(std::span<const GeoRegion> regions, std::optional<RegionKind> kind)
{
  Json features = Json::array();
  for (const auto& r : regions) {
    if (kind && r.kind != *kind) continue;
    features.push_back(region_feature(r));
  }
  return Json{{"type", "FeatureCollection"}, {"features", features}};
}

}  // namespace safetydash
