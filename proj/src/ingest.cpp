#include "safetydash/ingest.hpp"

#include "safetydash/csv.hpp"
#include "safetydash/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

namespace safetydash {

namespace {

std::string_view trim(std::string_view s)
{
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view text)
{
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> parse_count(std::string_view text)
{
  text = trim(text);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || v < 0) return std::nullopt;
  return v;
}

// Shared row loop: header handling, blank-line skipping, field-count checks.
class Table {
 public:
  Table(std::istream& in, std::string dataset) : reader_(in), dataset_(std::move(dataset))
  {
    std::vector<std::string> names;
    if (reader_.next(names)) header_ = csv::Header(names);
  }

  std::size_t require(std::string_view column) const
  {
    auto idx = header_.find(column);
    if (!idx) throw SchemaError(dataset_, std::string(column));
    return *idx;
  }
  std::optional<std::size_t> optional(std::string_view column) const { return header_.find(column); }
  const csv::Header& header() const { return header_; }

  // Next non-blank row with the right arity; malformed arity is reported.
  bool next(std::vector<std::string>& row, std::vector<RowError>& errors)
  {
    while (reader_.next(row)) {
      if (row.size() == 1 && trim(row[0]).empty()) continue;
      if (row.size() != header_.names().size()) {
        errors.push_back({reader_.line(), "expected " + std::to_string(header_.names().size()) + " fields, got " +
                                              std::to_string(row.size())});
        continue;
      }
      return true;
    }
    return false;
  }

  std::size_t line() const { return reader_.line(); }

 private:
  csv::Reader reader_;
  std::string dataset_;
  csv::Header header_;
};

std::string_view field(const std::vector<std::string>& row, std::optional<std::size_t> idx)
{
  return idx ? trim(row[*idx]) : std::string_view{};
}

struct CoordColumns {
  std::optional<std::size_t> lat;
  std::optional<std::size_t> lon;
};

// Both blank -> absent; otherwise both must parse into range.
bool read_location(const std::vector<std::string>& row, CoordColumns cols, std::optional<GeoPoint>& out,
                   std::string& reason)
{
  const auto lat_text = field(row, cols.lat);
  const auto lon_text = field(row, cols.lon);
  if (lat_text.empty() && lon_text.empty()) {
    out.reset();
    return true;
  }
  auto lat = parse_number(lat_text);
  auto lon = parse_number(lon_text);
  if (!lat || !lon || !is_valid(GeoPoint{*lat, *lon})) {
    reason = "malformed coordinates '" + std::string(lat_text) + "', '" + std::string(lon_text) + "'";
    return false;
  }
  out = canonical(GeoPoint{*lat, *lon});
  return true;
}

}  // namespace

bool parse_flag(std::string_view text, bool& known)
{
  std::string v;
  for (char c : trim(text)) v.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (v == "Y" || v == "YES" || v == "TRUE") {
    known = true;
    return true;
  }
  known = v == "N" || v == "NO" || v == "FALSE";
  return false;
}

Parsed<CrimeRecord> parse_crimes(std::istream& in, const UcrTable& ucr)
{
  Table t(in, "crimes");
  const auto c_id = t.require("id");
  const auto c_report = t.require("report_date");
  const auto c_occ = t.require("occurrence_date");
  const auto c_addr = t.require("address");
  const auto c_ucr = t.require("ucr_code");
  const auto c_time = t.optional("occurrence_time");
  const CoordColumns coords{t.optional("lat"), t.optional("lon")};

  Parsed<CrimeRecord> out;
  std::vector<std::string> row;
  while (t.next(row, out.errors)) {
    auto fail = [&](std::string reason) { out.errors.push_back({t.line(), std::move(reason)}); };
    CrimeRecord rec;
    rec.id = std::string(field(row, c_id));
    if (rec.id.empty()) {
      fail("empty id");
      continue;
    }
    auto report = parse_date(row[c_report]);
    if (!report) {
      fail("unparseable report_date '" + row[c_report] + "'");
      continue;
    }
    rec.report_date = *report;
    auto occ = parse_date_time(row[c_occ]);
    if (!occ) {
      fail("unparseable occurrence_date '" + row[c_occ] + "'");
      continue;
    }
    rec.occurrence_at = *occ;
    if (const auto time_text = field(row, c_time); !time_text.empty()) {
      auto combined = parse_date_time(format_date(occ->date) + "T" + std::string(time_text));
      if (!combined) combined = parse_date_time(format_date(occ->date) + " " + std::string(time_text));
      if (!combined) {
        fail("unparseable occurrence_time '" + std::string(time_text) + "'");
        continue;
      }
      rec.occurrence_at.time_of_day = combined->time_of_day;
    }
    rec.address = std::string(field(row, c_addr));
    rec.ucr_code = std::string(field(row, c_ucr));
    if (rec.ucr_code.empty()) {
      fail("empty ucr_code");
      continue;
    }
    if (!ucr.contains(rec.ucr_code)) ++out.coerced;
    rec.category = ucr.categorize(rec.ucr_code);
    std::string reason;
    if (!read_location(row, coords, rec.location, reason)) {
      fail(reason);
      continue;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

Parsed<CodeViolationRecord> parse_violations(std::istream& in)
{
  Table t(in, "violations");
  const auto c_id = t.require("id");
  const auto c_report = t.require("report_date");
  const auto c_addr = t.require("address");
  const auto c_status = t.require("status");
  const auto c_inspect = t.optional("last_inspection_date");
  const auto c_vacant = t.optional("open_and_vacant");
  const auto c_growth = t.optional("overgrowth");
  const auto c_util = t.optional("active_utilities");
  const CoordColumns coords{t.optional("lat"), t.optional("lon")};

  Parsed<CodeViolationRecord> out;
  std::vector<std::string> row;
  while (t.next(row, out.errors)) {
    auto fail = [&](std::string reason) { out.errors.push_back({t.line(), std::move(reason)}); };
    CodeViolationRecord rec;
    rec.id = std::string(field(row, c_id));
    if (rec.id.empty()) {
      fail("empty id");
      continue;
    }
    auto report = parse_date(row[c_report]);
    if (!report) {
      fail("unparseable report_date '" + row[c_report] + "'");
      continue;
    }
    rec.report_date = *report;
    if (const auto text = field(row, c_inspect); !text.empty()) {
      rec.last_inspection_date = parse_date(text);
      if (!rec.last_inspection_date) {
        fail("unparseable last_inspection_date '" + std::string(text) + "'");
        continue;
      }
    }
    rec.address = std::string(field(row, c_addr));
    rec.status = std::string(field(row, c_status));

    bool row_known = true;
    auto flag = [&](std::optional<std::size_t> col) {
      bool known = false;
      const bool v = parse_flag(field(row, col), known);
      row_known = row_known && known;
      return v;
    };
    rec.open_and_vacant = flag(c_vacant);
    rec.overgrowth = flag(c_growth);
    rec.active_utilities = flag(c_util);
    if (!row_known) ++out.coerced;

    std::string reason;
    if (!read_location(row, coords, rec.location, reason)) {
      fail(reason);
      continue;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

Parsed<Asset> parse_assets(std::istream& in)
{
  Table t(in, "assets");
  const auto c_id = t.require("id");
  const auto c_kind = t.require("kind");
  const auto c_name = t.require("name");
  const CoordColumns coords{t.require("lat"), t.require("lon")};
  const std::set<std::size_t> fixed{c_id, c_kind, c_name, *coords.lat, *coords.lon};

  Parsed<Asset> out;
  std::vector<std::string> row;
  while (t.next(row, out.errors)) {
    auto fail = [&](std::string reason) { out.errors.push_back({t.line(), std::move(reason)}); };
    Asset a;
    a.id = std::string(field(row, c_id));
    if (a.id.empty()) {
      fail("empty id");
      continue;
    }
    auto kind = parse_asset_kind(field(row, c_kind));
    if (!kind) {
      fail("unknown asset kind '" + row[c_kind] + "'");
      continue;
    }
    a.kind = *kind;
    a.name = std::string(field(row, c_name));
    std::optional<GeoPoint> loc;
    std::string reason;
    if (!read_location(row, coords, loc, reason)) {
      fail(reason);
      continue;
    }
    if (!loc) {
      fail("asset without coordinates");
      continue;
    }
    a.location = *loc;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (fixed.count(i) || row[i].empty()) continue;
      a.details.emplace_back(t.header().names()[i], row[i]);
    }
    out.records.push_back(std::move(a));
  }
  return out;
}

CensusTable parse_census(std::istream& in)
{
  Table t(in, "census");
  const auto c_id = t.require("region_id");
  const auto c_kind = t.require("region_kind");
  const auto c_pop = t.require("population");

  CensusTable out;
  std::vector<std::size_t> factor_cols;
  for (std::size_t i = 0; i < t.header().names().size(); ++i) {
    if (i == c_id || i == c_kind || i == c_pop) continue;
    factor_cols.push_back(i);
    out.factor_names.push_back(t.header().names()[i]);
  }

  std::set<std::pair<RegionKind, std::string>> seen;
  std::vector<std::string> row;
  while (t.next(row, out.errors)) {
    auto fail = [&](std::string reason) { out.errors.push_back({t.line(), std::move(reason)}); };
    CensusProfile p;
    p.region_id = std::string(field(row, c_id));
    if (p.region_id.empty()) {
      fail("empty region_id");
      continue;
    }
    auto kind = parse_region_kind(field(row, c_kind));
    if (!kind || *kind == RegionKind::city) {
      fail("region_kind must be npu or neighborhood, got '" + row[c_kind] + "'");
      continue;
    }
    p.region_kind = *kind;
    if (const auto text = field(row, c_pop); !text.empty()) {
      auto pop = parse_count(text);
      if (!pop) {
        fail("bad population '" + std::string(text) + "'");
        continue;
      }
      p.population = *pop;
    }
    bool ok = true;
    for (std::size_t k = 0; k < factor_cols.size(); ++k) {
      const auto text = field(row, factor_cols[k]);
      if (text.empty()) continue;
      auto v = parse_number(text);
      if (!v) {
        fail("non-numeric value '" + std::string(text) + "' for factor " + out.factor_names[k]);
        ok = false;
        break;
      }
      p.factors[out.factor_names[k]] = canonical(*v);
    }
    if (!ok) continue;
    if (!seen.emplace(p.region_kind, p.region_id).second) {
      fail("duplicate census row for " + p.region_id);
      continue;
    }
    out.profiles.push_back(std::move(p));
  }
  return out;
}

}  // namespace safetydash
