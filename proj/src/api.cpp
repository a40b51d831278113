#include "safetydash/api.hpp"

#include "safetydash/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace safetydash {

namespace {

std::string param(const Params& p, const std::string& name)
{
  auto it = p.find(name);
  return it == p.end() ? std::string{} : it->second;
}

std::vector<std::string> split_csv(const std::string& text)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_positive(const std::string& text, const char* what, double fallback)
{
  if (text.empty()) return fallback;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(ErrorCode::bad_param, std::string(what) + " must be a positive number");
  }
  return v;
}

int parse_zoom(const std::string& text)
{
  if (text.empty()) return 12;
  int z = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), z);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DomainError(ErrorCode::bad_zoom, "zoom must be an integer in [0, 22]");
  }
  return z;
}

Json date_range_json(std::optional<Date> lo, std::optional<Date> hi)
{
  if (!lo) return nullptr;
  return Json{{"from", format_date(*lo)}, {"to", format_date(*hi)}};
}

Json report_json(const DatasetReport& r)
{
  return Json{{"parsed", r.parsed},     {"row_errors", r.row_errors},         {"located", r.located},
              {"geocoded", r.geocoded}, {"geocode_failed", r.geocode_failed}, {"unjoined", r.unjoined},
              {"coerced", r.coerced}};
}

}  // namespace

bool parse_bool_param(std::string_view text, bool fallback)
{
  if (text.empty()) return fallback;
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw DomainError(ErrorCode::bad_param, "expected a boolean, got '" + std::string(text) + "'");
}

Json to_json(const TimeSeries& s)
{
  Json points = Json::array();
  for (const auto& p : s.points) points.push_back(Json{{"bucket", p.label}, {"count", p.count}});
  return Json{{"granularity", to_string(s.granularity)}, {"points", std::move(points)}};
}

Json to_json(const NpuCounts& c)
{
  Json entries = Json::array();
  for (const auto& e : c.entries) {
    Json value = c.per_capita ? Json(e.value) : Json(e.count);
    entries.push_back(Json{{"npu", e.npu},
                           {"name", e.name},
                           {"count", e.count},
                           {"value", std::move(value)},
                           {"westside", e.westside}});
  }
  return Json{{"per_capita", c.per_capita}, {"total", c.total}, {"unjoined", c.unjoined}, {"npus", std::move(entries)}};
}

Json to_json(const TypeShare& s)
{
  Json out = Json::object();
  for (const auto& [type, pct] : s) out[type] = pct;
  return out;
}

Json to_json(const CorrelationResult& r)
{
  return Json{{"factor", r.factor},
              {"measure", r.measure.label()},
              {"scope", to_string(r.scope)},
              {"r", r.r ? Json(*r.r) : Json(nullptr)},
              {"n", r.n},
              {"excluded", r.excluded}};
}

Json hexes_geojson(const std::vector<HexCell>& cells, const HexGridConfig& cfg)
{
  Json features = Json::array();
  for (const auto& c : cells) {
    features.push_back(Json{
        {"type", "Feature"},
        {"properties", {{"q", c.coord.q}, {"r", c.coord.r}, {"count", c.count}, {"color_class", c.color_class}}},
        {"geometry", {{"type", "Polygon"}, {"coordinates", Json::array({ring_coords(hex_polygon(c.coord, cfg))})}}},
    });
  }
  return Json{{"type", "FeatureCollection"},
              {"hex_size_m", cfg.hex_size_m},
              {"origin", point_coords(cfg.origin)},
              {"features", std::move(features)}};
}

Json clusters_geojson(const std::vector<PinCluster>& clusters)
{
  Json features = Json::array();
  for (const auto& c : clusters) {
    Json props{{"count", c.count}};
    if (c.count <= kMaxListedMembers) props["member_ids"] = c.member_ids;
    features.push_back(Json{{"type", "Feature"},
                            {"properties", std::move(props)},
                            {"geometry", {{"type", "Point"}, {"coordinates", point_coords(c.centroid)}}}});
  }
  return Json{{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

Json assets_geojson(const std::vector<Asset>& assets)
{
  Json features = Json::array();
  for (const auto& a : assets) {
    Json details = Json::object();
    for (const auto& [k, v] : a.details) details[k] = v;
    features.push_back(Json{
        {"type", "Feature"},
        {"properties", {{"id", a.id}, {"kind", to_string(a.kind)}, {"name", a.name}, {"details", std::move(details)}}},
        {"geometry", {{"type", "Point"}, {"coordinates", point_coords(a.location)}}}});
  }
  return Json{{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

Json error_json(int status, std::string_view code, std::string_view message)
{
  return Json{{"error", {{"status", status}, {"code", code}, {"message", message}}}};
}

Json meta_json(const DataSnapshot& snap)
{
  std::optional<Date> crime_lo, crime_hi, viol_lo, viol_hi;
  for (const auto& c : snap.crimes()) {
    const Date d = c.occurrence_at.date;
    if (!crime_lo || d < *crime_lo) crime_lo = d;
    if (!crime_hi || d > *crime_hi) crime_hi = d;
  }
  for (const auto& v : snap.violations()) {
    if (!viol_lo || v.report_date < *viol_lo) viol_lo = v.report_date;
    if (!viol_hi || v.report_date > *viol_hi) viol_hi = v.report_date;
  }
  const auto& rep = snap.report();
  return Json{
      {"format_version", kSnapshotFormatVersion},
      {"built_at", snap.built_at()},
      {"counts",
       {{"crimes", snap.crimes().size()},
        {"violations", snap.violations().size()},
        {"assets", snap.assets().size()},
        {"census", snap.census().size()}}},
      {"ingest_report",
       {{"crimes", report_json(rep.crimes)},
        {"violations", report_json(rep.violations)},
        {"assets", report_json(rep.assets)},
        {"census", report_json(rep.census)}}},
      {"npus", snap.region_ids(RegionKind::npu)},
      {"neighborhoods", snap.region_ids(RegionKind::neighborhood)},
      {"factors", snap.census_factors()},
      {"date_ranges", {{"crimes", date_range_json(crime_lo, crime_hi)}, {"violations", date_range_json(viol_lo, viol_hi)}}},
  };
}

Json api_meta(const DataSnapshot& snap) { return meta_json(snap); }

Json api_timeseries(const DataSnapshot& snap, const Params& p)
{
  const auto ds = parse_dataset(param(p, "dataset").empty() ? "crimes" : param(p, "dataset"));
  const auto scope = parse_scope(param(p, "scope"));
  const auto g = parse_granularity(param(p, "granularity").empty() ? "month" : param(p, "granularity"));
  const auto range = parse_range(param(p, "from"), param(p, "to"));
  const auto pair = timeseries(snap, ds, scope, g, range);
  return Json{{"dataset", to_string(ds)},
              {"scope", scope.label()},
              {"granularity", to_string(g)},
              {"scope_series", to_json(pair.scope_series)},
              {"city_series", to_json(pair.city_series)}};
}

Json api_npus(const DataSnapshot& snap, const Params& p)
{
  const auto ds = parse_dataset(param(p, "dataset").empty() ? "crimes" : param(p, "dataset"));
  const auto range = parse_range(param(p, "from"), param(p, "to"));
  const bool per_capita = parse_bool_param(param(p, "per_capita"), false);
  Json out = to_json(counts_by_npu(snap, ds, range, per_capita));
  Json body{{"dataset", to_string(ds)}};
  for (auto& [k, v] : out.items()) body[k] = v;
  return body;
}

Json api_type_share(const DataSnapshot& snap, const Params& p)
{
  const auto ds = parse_dataset(param(p, "dataset").empty() ? "crimes" : param(p, "dataset"));
  const auto scope = parse_scope(param(p, "scope"));
  const bool fine = param(p, "types") == "ucr";
  if (!param(p, "types").empty() && !fine && param(p, "types") != "category") {
    throw DomainError(ErrorCode::bad_param, "types must be category or ucr");
  }
  const auto pair = type_share_pair(snap, ds, scope, fine);
  return Json{{"dataset", to_string(ds)},
              {"scope", scope.label()},
              {"types", fine ? "ucr" : "category"},
              {"scope_shares", to_json(pair.scope_shares)},
              {"city_shares", to_json(pair.city_shares)}};
}

Json api_correlations(const DataSnapshot& snap, const Params& p)
{
  const auto m = parse_measure(param(p, "measure"));
  const auto scope = parse_correlation_scope(param(p, "scope"));
  const auto results = correlate_factors(snap, split_csv(param(p, "factors")), m, scope);
  Json rows = Json::array();
  for (const auto& r : results) rows.push_back(to_json(r));
  return Json{{"measure", m.label()},
              {"scope", to_string(scope)},
              {"caveat", kCorrelationCaveat},
              {"results", std::move(rows)}};
}

Json api_hexes(const DataSnapshot& snap, const Params& p, HexmapCache* cache)
{
  const auto filter = parse_crime_filter(param(p, "span"), param(p, "categories"), param(p, "ucr"));
  const auto cfg = default_grid(snap, parse_positive(param(p, "hex_size"), "hex_size", kDefaultHexSizeM));
  if (cache) return hexes_geojson(*cache->get(snap, filter, cfg), cfg);
  return hexes_geojson(build_hexmap(snap, filter, cfg), cfg);
}

Json api_violations(const DataSnapshot& snap, const Params& p)
{
  const auto span = parse_span(param(p, "span"));
  const int zoom = parse_zoom(param(p, "zoom"));
  const double factor = parse_positive(param(p, "cell_factor"), "cell_factor", kDefaultClusterCellFactor);
  Json out = clusters_geojson(violation_pins(snap, span, zoom, factor));
  out["zoom"] = zoom;
  out["span"] = span.label();
  return out;
}

Json api_assets(const DataSnapshot& snap, const Params& p)
{
  return assets_geojson(asset_pins(snap, parse_asset_kinds(param(p, "kinds"))));
}

Json api_regions(const DataSnapshot& snap, const Params& p)
{
  const auto text = param(p, "kind");
  std::optional<RegionKind> kind;
  if (!text.empty()) {
    kind = parse_region_kind(text);
    if (!kind) throw DomainError(ErrorCode::bad_kind, "region kind must be npu, neighborhood, or city");
  }
  return regions_collection(snap.regions(), kind);
}

Api::Api(std::shared_ptr<const DataSnapshot> snap, ApiOptions options)
    : snap_(std::move(snap)), options_(std::move(options))
{
}

std::shared_ptr<const DataSnapshot> Api::snapshot() const
{
  std::lock_guard lock(mu_);
  return snap_;
}

ApiResponse Api::get(const std::string& path, const Params& params) const
{
  auto fail = [](ErrorCode code, const std::string& message) {
    const int status = http_status(code);
    return ApiResponse{status, error_json(status, to_string(code), message).dump()};
  };
  const auto snap = snapshot();
  if (!snap) return fail(ErrorCode::no_snapshot, "no snapshot loaded");
  try {
    Json body;
    if (path == "/api/meta") {
      body = api_meta(*snap);
    } else if (path == "/api/aggregate/timeseries") {
      body = api_timeseries(*snap, params);
    } else if (path == "/api/aggregate/npus") {
      body = api_npus(*snap, params);
    } else if (path == "/api/aggregate/type-share") {
      body = api_type_share(*snap, params);
    } else if (path == "/api/correlations") {
      body = api_correlations(*snap, params);
    } else if (path == "/api/map/hexes") {
      body = api_hexes(*snap, params, &cache_);
    } else if (path == "/api/map/violations") {
      Params p = params;
      if (!p.count("cell_factor") && options_.cluster_cell_factor != kDefaultClusterCellFactor) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", options_.cluster_cell_factor);
        p["cell_factor"] = buf;
      }
      body = api_violations(*snap, p);
    } else if (path == "/api/map/assets") {
      body = api_assets(*snap, params);
    } else if (path == "/api/regions") {
      body = api_regions(*snap, params);
    } else {
      return fail(ErrorCode::not_found, "no route " + path);
    }
    const bool geo = path.rfind("/api/map/", 0) == 0 || path == "/api/regions";
    return ApiResponse{200, body.dump(), geo ? "application/geo+json" : "application/json"};
  } catch (const DomainError& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception&) {
    return fail(ErrorCode::internal, "internal error");
  }
}

ApiResponse Api::reload()
{
  if (options_.snapshot_path.empty()) {
    return ApiResponse{404, error_json(404, "not_found", "reload not configured").dump()};
  }
  try {
    auto fresh = std::make_shared<const DataSnapshot>(load_snapshot(options_.snapshot_path));
    {
      std::lock_guard lock(mu_);
      snap_ = fresh;
    }
    return ApiResponse{200, meta_json(*fresh).dump()};
  } catch (const std::exception&) {
    return ApiResponse{500, error_json(500, "internal", "reload failed; previous snapshot kept").dump()};
  }
}

std::string Api::allowed_origin(const std::string& origin) const
{
  for (const auto& o : options_.cors_origins) {
    if (o == "*") return "*";
    if (!origin.empty() && o == origin) return origin;
  }
  return {};
}

}  // namespace safetydash
