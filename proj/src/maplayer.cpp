#include "safetydash/maplayer.hpp"

#include "safetydash/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

namespace safetydash {

namespace {

std::vector<std::string_view> split_list(std::string_view text)
{
  std::vector<std::string_view> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    auto item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

bool all_digits(std::string_view s)
{
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

struct CellKey {
  long long x;
  long long y;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const
  {
    return std::hash<long long>{}(k.x) ^ (std::hash<long long>{}(k.y) * 0x9E3779B97F4A7C15ULL);
  }
};

}  // namespace

int color_class(long long count)
{
  if (count < 1) throw DomainError(ErrorCode::bad_param, "color class needs a positive count");
  if (count == 1) return 1;
  if (count <= 10) return 2;
  if (count <= 100) return 3;
  if (count <= 1000) return 4;
  return 5;
}

bool Span::contains(Date d) const
{
  switch (kind) {
    case Kind::all: return true;
    case Kind::year: return year_of(d) == year;
    case Kind::month: return year_of(d) == year && month_of(d) == month;
  }
  return false;
}

std::string Span::label() const
{
  char buf[16];
  switch (kind) {
    case Kind::all: return "all";
    case Kind::year: std::snprintf(buf, sizeof buf, "%04d", year); return buf;
    case Kind::month: std::snprintf(buf, sizeof buf, "%04d-%02u", year, month); return buf;
  }
  return "all";
}

Span parse_span(std::string_view text)
{
  if (text.empty() || text == "all") return {};
  auto bad = [&] {
    return DomainError(ErrorCode::bad_span, "bad span '" + std::string(text) + "' (expected all, YYYY, or YYYY-MM)");
  };
  if (text.size() != 4 && text.size() != 7) throw bad();
  const auto ytext = text.substr(0, 4);
  if (!all_digits(ytext)) throw bad();
  Span s;
  std::from_chars(ytext.data(), ytext.data() + 4, s.year);
  if (text.size() == 4) {
    s.kind = Span::Kind::year;
    return s;
  }
  const auto mtext = text.substr(5, 2);
  if (text[4] != '-' || !all_digits(mtext)) throw bad();
  std::from_chars(mtext.data(), mtext.data() + 2, s.month);
  if (s.month < 1 || s.month > 12) throw bad();
  s.kind = Span::Kind::month;
  return s;
}

bool CrimeFilter::matches(const CrimeRecord& c) const
{
  if (categories && !categories->count(c.category)) return false;
  if (ucr_codes && !ucr_codes->count(c.ucr_code)) return false;
  return span.contains(c.occurrence_at.date);
}

std::string CrimeFilter::key() const
{
  std::string k = "span=" + span.label();
  if (categories) {
    k += ";cat=";
    for (auto c : *categories) k += std::string(to_string(c)) + ",";
  }
  if (ucr_codes) {
    k += ";ucr=";
    for (const auto& u : *ucr_codes) k += u + ",";
  }
  return k;
}

void validate(const CrimeFilter& f)
{
  if (f.categories && f.ucr_codes) {
    throw DomainError(ErrorCode::bad_filter, "categories and ucr codes are mutually exclusive");
  }
}

CrimeFilter parse_crime_filter(std::string_view span, std::string_view categories, std::string_view ucr)
{
  CrimeFilter f;
  f.span = parse_span(span);
  if (!categories.empty()) {
    std::set<CrimeCategory> cats;
    for (auto item : split_list(categories)) {
      auto c = parse_category(item);
      if (!c) throw DomainError(ErrorCode::bad_category, "unknown crime category '" + std::string(item) + "'");
      cats.insert(*c);
    }
    f.categories = std::move(cats);
  }
  if (!ucr.empty()) {
    std::set<std::string> codes;
    for (auto item : split_list(ucr)) codes.emplace(item);
    f.ucr_codes = std::move(codes);
  }
  validate(f);
  return f;
}

std::vector<CrimeRecord> filter_crimes(const DataSnapshot& snap, const CrimeFilter& f)
{
  validate(f);
  std::vector<CrimeRecord> out;
  for (const auto& c : snap.crimes()) {
    if (f.matches(c)) out.push_back(c);
  }
  return out;
}

HexGridConfig default_grid(const DataSnapshot& snap, double hex_size_m)
{
  HexGridConfig cfg;
  cfg.hex_size_m = hex_size_m;
  if (auto box = snap.extent()) {
    cfg.origin = canonical(GeoPoint{0.5 * (box->min_lat + box->max_lat), 0.5 * (box->min_lon + box->max_lon)});
  }
  return cfg;
}

std::vector<HexCell> build_hexmap(const DataSnapshot& snap, const CrimeFilter& f, const HexGridConfig& cfg)
{
  validate(f);
  validate(cfg);
  std::map<HexCoord, long long> counts;
  for (const auto& c : snap.crimes()) {
    if (!c.location || !f.matches(c)) continue;
    ++counts[hex_index(*c.location, cfg)];
  }
  std::vector<HexCell> out;
  out.reserve(counts.size());
  for (const auto& [coord, count] : counts) out.push_back({coord, count, color_class(count)});
  return out;
}

double cluster_cell_deg(int zoom, double cell_factor) { return 360.0 / std::ldexp(1.0, zoom) * cell_factor; }

std::vector<PinCluster> cluster_pins(std::span<const PinPoint> points, int zoom, double cell_factor)
{
  if (zoom < 0 || zoom > 22) throw DomainError(ErrorCode::bad_zoom, "zoom must be in [0, 22]");
  if (!(cell_factor > 0.0)) throw DomainError(ErrorCode::bad_param, "cluster cell factor must be positive");
  const double side = cluster_cell_deg(zoom, cell_factor);

  struct Acc {
    double sum_lat = 0.0;
    double sum_lon = 0.0;
    std::vector<std::size_t> members;
  };
  std::unordered_map<CellKey, Acc, CellKeyHash> cells;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i].location;
    CellKey k{static_cast<long long>(std::floor(p.lon / side)), static_cast<long long>(std::floor(p.lat / side))};
    auto& acc = cells[k];
    acc.sum_lat += p.lat;
    acc.sum_lon += p.lon;
    acc.members.push_back(i);
  }

  std::vector<std::pair<CellKey, Acc*>> ordered;
  ordered.reserve(cells.size());
  for (auto& [k, acc] : cells) ordered.emplace_back(k, &acc);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return std::tie(a.first.x, a.first.y) < std::tie(b.first.x, b.first.y); });

  std::vector<PinCluster> out;
  out.reserve(ordered.size());
  for (const auto& [k, acc] : ordered) {
    PinCluster c;
    c.count = static_cast<long long>(acc->members.size());
    const double n = static_cast<double>(c.count);
    c.centroid = {acc->sum_lat / n, acc->sum_lon / n};
    if (c.count <= kMaxListedMembers) {
      for (std::size_t i : acc->members) c.member_ids.push_back(points[i].id);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<PinCluster> violation_pins(const DataSnapshot& snap, const Span& span, int zoom, double cell_factor)
{
  std::vector<PinPoint> points;
  for (const auto& v : snap.violations()) {
    if (v.location && span.contains(v.report_date)) points.push_back({v.id, *v.location});
  }
  return cluster_pins(points, zoom, cell_factor);
}

std::vector<Asset> asset_pins(const DataSnapshot& snap, const std::optional<std::set<AssetKind>>& kinds)
{
  std::vector<Asset> out;
  for (const auto& a : snap.assets()) {
    if (!kinds || kinds->count(a.kind)) out.push_back(a);
  }
  return out;
}

std::optional<std::set<AssetKind>> parse_asset_kinds(std::string_view csv)
{
  if (csv.empty()) return std::nullopt;
  std::set<AssetKind> kinds;
  for (auto item : split_list(csv)) {
    auto k = parse_asset_kind(item);
    if (!k) throw DomainError(ErrorCode::bad_kind, "unknown asset kind '" + std::string(item) + "'");
    kinds.insert(*k);
  }
  return kinds;
}

std::string HexmapCache::key(const DataSnapshot& snap, const CrimeFilter& f, const HexGridConfig& cfg)
{
  char buf[96];
  std::snprintf(buf, sizeof buf, "%llu|%.17g,%.17g,%.17g|", static_cast<unsigned long long>(snap.identity()),
                cfg.origin.lat, cfg.origin.lon, cfg.hex_size_m);
  return buf + f.key();
}

std::shared_ptr<const std::vector<HexCell>> HexmapCache::get(const DataSnapshot& snap, const CrimeFilter& f,
                                                             const HexGridConfig& cfg)
{
  const std::string k = key(snap, f, cfg);
  {
    std::shared_lock lock(mu_);
    if (auto it = entries_.find(k); it != entries_.end()) {
      ++hits_;
      return it->second;
    }
  }
  auto value = std::make_shared<const std::vector<HexCell>>(build_hexmap(snap, f, cfg));
  std::unique_lock lock(mu_);
  if (entries_.size() >= max_entries_) entries_.clear();
  auto [it, inserted] = entries_.emplace(k, value);
  return it->second;
}

std::size_t HexmapCache::size() const
{
  std::shared_lock lock(mu_);
  return entries_.size();
}

std::size_t HexmapCache::hits() const { return hits_.load(); }

}  // namespace safetydash
