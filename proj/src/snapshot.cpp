#include "safetydash/snapshot.hpp"

#include "safetydash/error.hpp"
#include "safetydash/geojson.hpp"

#include <atomic>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

namespace safetydash {

namespace {

std::atomic<std::uint64_t> g_next_identity{1};

template <class Rec>
DatasetReport tally(const std::vector<Rec>& records, const DatasetReport& partial, std::size_t unjoined)
{
  DatasetReport r = partial;
  r.parsed = records.size();
  r.located = 0;
  for (const auto& rec : records) r.located += rec.location ? 1 : 0;
  r.geocode_failed = r.parsed - r.located;
  r.unjoined = unjoined;
  return r;
}

Json optional_string(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

Json optional_point(const std::optional<GeoPoint>& p) { return p ? point_coords(*p) : Json(nullptr); }

Json report_json(const DatasetReport& r)
{
  return Json{{"parsed", r.parsed},     {"row_errors", r.row_errors},         {"located", r.located},
              {"geocoded", r.geocoded}, {"geocode_failed", r.geocode_failed}, {"unjoined", r.unjoined},
              {"coerced", r.coerced}};
}

DatasetReport report_from(const Json& j)
{
  DatasetReport r;
  r.parsed = j.at("parsed").get<std::size_t>();
  r.row_errors = j.at("row_errors").get<std::size_t>();
  r.located = j.at("located").get<std::size_t>();
  r.geocoded = j.at("geocoded").get<std::size_t>();
  r.geocode_failed = j.at("geocode_failed").get<std::size_t>();
  r.unjoined = j.at("unjoined").get<std::size_t>();
  r.coerced = j.at("coerced").get<std::size_t>();
  return r;
}

std::optional<std::string> string_or_null(const Json& j)
{
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

std::optional<GeoPoint> point_or_null(const Json& j)
{
  if (j.is_null()) return std::nullopt;
  if (!j.is_array() || j.size() != 2) throw FormatError("snapshot: location must be [lon, lat] or null");
  GeoPoint p{j[1].get<double>(), j[0].get<double>()};
  if (!is_valid(p)) throw FormatError("snapshot: location out of range");
  return p;
}

Date date_from(const Json& j)
{
  auto d = parse_date(j.get<std::string>());
  if (!d) throw FormatError("snapshot: bad date '" + j.get<std::string>() + "'");
  return *d;
}

template <class E, class F>
E enum_from(const Json& j, F parse, const char* what)
{
  auto v = parse(j.get<std::string>());
  if (!v) throw FormatError(std::string("snapshot: unknown ") + what + " '" + j.get<std::string>() + "'");
  return *v;
}

}  // namespace

std::string utc_now_iso()
{
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void DataSnapshot::index()
{
  region_index_.clear();
  census_index_.clear();
  ids_by_kind_.clear();
  neighborhood_npu_.clear();
  for (auto kind : {RegionKind::npu, RegionKind::neighborhood, RegionKind::city}) ids_by_kind_[kind];
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    region_index_[{regions_[i].kind, regions_[i].id}] = i;
    ids_by_kind_[regions_[i].kind].push_back(regions_[i].id);
  }
  for (auto& [kind, ids] : ids_by_kind_) std::sort(ids.begin(), ids.end());
  for (std::size_t i = 0; i < census_.size(); ++i) census_index_[{census_[i].region_kind, census_[i].region_id}] = i;

  RegionIndex npus(regions_, RegionKind::npu);
  for (const auto& r : regions_) {
    if (r.kind != RegionKind::neighborhood) continue;
    if (auto p = interior_point(r)) {
      if (auto npu = npus.assign(*p)) neighborhood_npu_[r.id] = *npu;
    }
  }
}

const GeoRegion* DataSnapshot::find_region(RegionKind kind, const std::string& id) const
{
  auto it = region_index_.find({kind, id});
  return it == region_index_.end() ? nullptr : &regions_[it->second];
}

const std::vector<std::string>& DataSnapshot::region_ids(RegionKind kind) const
{
  static const std::vector<std::string> empty;
  auto it = ids_by_kind_.find(kind);
  return it == ids_by_kind_.end() ? empty : it->second;
}

const CensusProfile* DataSnapshot::census_for(RegionKind kind, const std::string& id) const
{
  auto it = census_index_.find({kind, id});
  return it == census_index_.end() ? nullptr : &census_[it->second];
}

std::optional<long long> DataSnapshot::population(RegionKind kind, const std::string& id) const
{
  long long pop = 0;
  if (const auto* c = census_for(kind, id)) pop = c->population;
  if (pop == 0) {
    if (const auto* r = find_region(kind, id)) pop = r->population;
  }
  if (pop <= 0) return std::nullopt;
  return pop;
}

std::optional<std::string> DataSnapshot::npu_of_neighborhood(const std::string& id) const
{
  auto it = neighborhood_npu_.find(id);
  if (it == neighborhood_npu_.end()) return std::nullopt;
  return it->second;
}

std::optional<BBox> DataSnapshot::extent() const
{
  std::optional<BBox> box;
  auto add = [&](const BBox& b) {
    if (box) {
      box->extend(b);
    } else {
      box = b;
    }
  };
  for (const auto& r : regions_) add(r.bbox());
  if (box) return box;
  for (const auto& c : crimes_)
    if (c.location) add(BBox::of(*c.location));
  for (const auto& v : violations_)
    if (v.location) add(BBox::of(*v.location));
  for (const auto& a : assets_) add(BBox::of(a.location));
  return box;
}

bool DataSnapshot::same_content(const DataSnapshot& o) const
{
  return crimes_ == o.crimes_ && violations_ == o.violations_ && assets_ == o.assets_ && census_ == o.census_ &&
         factor_names_ == o.factor_names_ && regions_ == o.regions_ && report_ == o.report_;
}

DataSnapshot build_snapshot(SnapshotInputs in, std::string built_at)
{
  validate(std::span<const GeoRegion>(in.regions));
  for (auto& r : in.regions)
    for (auto& poly : r.polygons)
      for (auto& ring : poly)
        for (auto& p : ring) p = canonical(p);

  std::set<std::pair<RegionKind, std::string>> known;
  for (const auto& r : in.regions) known.emplace(r.kind, r.id);
  for (const auto& p : in.census.profiles) {
    if (!known.count({p.region_kind, p.region_id})) {
      throw ReferentialError("census row references unknown " + std::string(to_string(p.region_kind)) + " '" +
                             p.region_id + "'");
    }
  }

  for (auto& c : in.crimes)
    if (c.location) c.location = canonical(*c.location);
  for (auto& v : in.violations)
    if (v.location) v.location = canonical(*v.location);
  for (auto& a : in.assets) a.location = canonical(a.location);
  for (auto& p : in.census.profiles)
    for (auto& [name, value] : p.factors) value = canonical(value);

  const RegionJoiner joiner(in.regions);
  const std::size_t crimes_unjoined = spatial_join(in.crimes, joiner);
  const std::size_t violations_unjoined = spatial_join(in.violations, joiner);

  DataSnapshot snap;
  snap.report_.crimes = tally(in.crimes, in.partial.crimes, crimes_unjoined);
  snap.report_.violations = tally(in.violations, in.partial.violations, violations_unjoined);
  // Assets and census rows carry no optional location; they count as located.
  snap.report_.assets = in.partial.assets;
  snap.report_.assets.parsed = snap.report_.assets.located = in.assets.size();
  snap.report_.census = in.partial.census;
  snap.report_.census.parsed = snap.report_.census.located = in.census.profiles.size();
  snap.report_.census.row_errors = in.census.errors.size();

  snap.crimes_ = std::move(in.crimes);
  snap.violations_ = std::move(in.violations);
  snap.assets_ = std::move(in.assets);
  snap.census_ = std::move(in.census.profiles);
  snap.factor_names_ = std::move(in.census.factor_names);
  snap.regions_ = std::move(in.regions);
  snap.built_at_ = std::move(built_at);
  snap.identity_ = g_next_identity.fetch_add(1);
  snap.index();
  return snap;
}

Json snapshot_to_json(const DataSnapshot& snap)
{
  Json doc;
  doc["format_version"] = kSnapshotFormatVersion;
  doc["built_at"] = snap.built_at();
  const auto& rep = snap.report();
  doc["ingest_report"] = Json{{"crimes", report_json(rep.crimes)},
                              {"violations", report_json(rep.violations)},
                              {"assets", report_json(rep.assets)},
                              {"census", report_json(rep.census)}};

  Json regions = Json::array();
  for (const auto& r : snap.regions()) {
    Json polys = Json::array();
    for (const auto& poly : r.polygons) {
      Json rings = Json::array();
      for (const auto& ring : poly) rings.push_back(ring_coords(ring));
      polys.push_back(std::move(rings));
    }
    regions.push_back(Json{{"id", r.id},
                           {"kind", to_string(r.kind)},
                           {"name", r.name},
                           {"population", r.population},
                           {"polygons", std::move(polys)}});
  }
  doc["regions"] = std::move(regions);

  Json crimes = Json::array();
  for (const auto& c : snap.crimes()) {
    crimes.push_back(Json{
        {"id", c.id},
        {"report_date", format_date(c.report_date)},
        {"occurrence_date", format_date(c.occurrence_at.date)},
        {"occurrence_time", c.occurrence_at.time_of_day ? Json(format_time(*c.occurrence_at.time_of_day)) : Json()},
        {"address", c.address},
        {"ucr_code", c.ucr_code},
        {"category", to_string(c.category)},
        {"location", optional_point(c.location)},
        {"npu", optional_string(c.npu)},
        {"neighborhood", optional_string(c.neighborhood)},
    });
  }
  doc["crimes"] = std::move(crimes);

  Json violations = Json::array();
  for (const auto& v : snap.violations()) {
    violations.push_back(Json{
        {"id", v.id},
        {"report_date", format_date(v.report_date)},
        {"last_inspection_date", v.last_inspection_date ? Json(format_date(*v.last_inspection_date)) : Json()},
        {"address", v.address},
        {"status", v.status},
        {"open_and_vacant", v.open_and_vacant},
        {"overgrowth", v.overgrowth},
        {"active_utilities", v.active_utilities},
        {"location", optional_point(v.location)},
        {"npu", optional_string(v.npu)},
        {"neighborhood", optional_string(v.neighborhood)},
    });
  }
  doc["violations"] = std::move(violations);

  Json assets = Json::array();
  for (const auto& a : snap.assets()) {
    Json details = Json::array();
    for (const auto& [k, v] : a.details) details.push_back(Json::array({k, v}));
    assets.push_back(Json{{"id", a.id},
                          {"kind", to_string(a.kind)},
                          {"name", a.name},
                          {"location", point_coords(a.location)},
                          {"details", std::move(details)}});
  }
  doc["assets"] = std::move(assets);

  Json profiles = Json::array();
  for (const auto& p : snap.census()) {
    Json factors = Json::object();
    for (const auto& [k, v] : p.factors) factors[k] = v;
    profiles.push_back(Json{{"region_id", p.region_id},
                            {"region_kind", to_string(p.region_kind)},
                            {"population", p.population},
                            {"factors", std::move(factors)}});
  }
  doc["census"] = Json{{"factors", snap.census_factors()}, {"profiles", std::move(profiles)}};
  return doc;
}

DataSnapshot snapshot_from_json(const Json& doc)
{
  try {
    if (!doc.is_object()) throw FormatError("snapshot: top level must be an object");
    if (!doc.contains("format_version") || doc["format_version"] != kSnapshotFormatVersion) {
      throw FormatError("snapshot: unsupported format_version");
    }
    DataSnapshot snap;
    snap.built_at_ = doc.at("built_at").get<std::string>();
    const Json& rep = doc.at("ingest_report");
    snap.report_.crimes = report_from(rep.at("crimes"));
    snap.report_.violations = report_from(rep.at("violations"));
    snap.report_.assets = report_from(rep.at("assets"));
    snap.report_.census = report_from(rep.at("census"));

    for (const auto& j : doc.at("regions")) {
      GeoRegion r;
      r.id = j.at("id").get<std::string>();
      r.kind = enum_from<RegionKind>(j.at("kind"), parse_region_kind, "region kind");
      r.name = j.at("name").get<std::string>();
      r.population = j.at("population").get<long long>();
      for (const auto& poly : j.at("polygons")) {
        std::vector<Ring> rings;
        for (const auto& ring : poly) {
          Ring out;
          for (const auto& pos : ring) out.push_back(*point_or_null(pos));
          rings.push_back(std::move(out));
        }
        r.polygons.push_back(std::move(rings));
      }
      snap.regions_.push_back(std::move(r));
    }
    try {
      validate(std::span<const GeoRegion>(snap.regions_));
    } catch (const ValidationError& e) {
      throw FormatError(std::string("snapshot: ") + e.what());
    }

    for (const auto& j : doc.at("crimes")) {
      CrimeRecord c;
      c.id = j.at("id").get<std::string>();
      c.report_date = date_from(j.at("report_date"));
      c.occurrence_at.date = date_from(j.at("occurrence_date"));
      if (!j.at("occurrence_time").is_null()) {
        auto dt = parse_date_time("2000-01-01T" + j["occurrence_time"].get<std::string>());
        if (!dt) throw FormatError("snapshot: bad occurrence_time");
        c.occurrence_at.time_of_day = dt->time_of_day;
      }
      c.address = j.at("address").get<std::string>();
      c.ucr_code = j.at("ucr_code").get<std::string>();
      c.category = enum_from<CrimeCategory>(j.at("category"), parse_category, "category");
      c.location = point_or_null(j.at("location"));
      c.npu = string_or_null(j.at("npu"));
      c.neighborhood = string_or_null(j.at("neighborhood"));
      snap.crimes_.push_back(std::move(c));
    }

    for (const auto& j : doc.at("violations")) {
      CodeViolationRecord v;
      v.id = j.at("id").get<std::string>();
      v.report_date = date_from(j.at("report_date"));
      if (!j.at("last_inspection_date").is_null()) v.last_inspection_date = date_from(j["last_inspection_date"]);
      v.address = j.at("address").get<std::string>();
      v.status = j.at("status").get<std::string>();
      v.open_and_vacant = j.at("open_and_vacant").get<bool>();
      v.overgrowth = j.at("overgrowth").get<bool>();
      v.active_utilities = j.at("active_utilities").get<bool>();
      v.location = point_or_null(j.at("location"));
      v.npu = string_or_null(j.at("npu"));
      v.neighborhood = string_or_null(j.at("neighborhood"));
      snap.violations_.push_back(std::move(v));
    }

    for (const auto& j : doc.at("assets")) {
      Asset a;
      a.id = j.at("id").get<std::string>();
      a.kind = enum_from<AssetKind>(j.at("kind"), parse_asset_kind, "asset kind");
      a.name = j.at("name").get<std::string>();
      auto loc = point_or_null(j.at("location"));
      if (!loc) throw FormatError("snapshot: asset without location");
      a.location = *loc;
      for (const auto& kv : j.at("details")) a.details.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
      snap.assets_.push_back(std::move(a));
    }

    const Json& census = doc.at("census");
    snap.factor_names_ = census.at("factors").get<std::vector<std::string>>();
    for (const auto& j : census.at("profiles")) {
      CensusProfile p;
      p.region_id = j.at("region_id").get<std::string>();
      p.region_kind = enum_from<RegionKind>(j.at("region_kind"), parse_region_kind, "region kind");
      p.population = j.at("population").get<long long>();
      for (const auto& [k, v] : j.at("factors").items()) p.factors[k] = v.get<double>();
      snap.census_.push_back(std::move(p));
    }

    snap.identity_ = g_next_identity.fetch_add(1);
    snap.index();
    return snap;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("snapshot: ") + e.what());
  }
}

std::string serialize_snapshot(const DataSnapshot& snap) { return snapshot_to_json(snap).dump(1) + "\n"; }

void save_snapshot(const DataSnapshot& snap, const std::string& path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write snapshot '" + path + "'");
  out << serialize_snapshot(snap);
  if (!out) throw FormatError("cannot write snapshot '" + path + "'");
}

DataSnapshot parse_snapshot(std::string_view text)
{
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("snapshot: ") + e.what());
  }
  return snapshot_from_json(doc);
}

DataSnapshot load_snapshot(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read snapshot '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_snapshot(buf.str());
}

}  // namespace safetydash
