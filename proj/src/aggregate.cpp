#include "safetydash/aggregate.hpp"

#include "safetydash/error.hpp"

#include <cstdio>
#include <functional>

namespace safetydash {

namespace {

long long floor_div(long long a, long long b)
{
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

long long days_of(Date d) { return d.time_since_epoch().count(); }

Date from_days(long long days) { return Date{std::chrono::days{days}}; }

constexpr const char* kWeekdayNames[] = {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};

// Calls fn(event_date, npu_tag, type) for each record of the selected datasets.
void for_each_event(const DataSnapshot& snap, DatasetSelector ds, bool fine_types,
                    const std::function<void(Date, const std::optional<std::string>&, const std::string&)>& fn)
{
  const bool prefix = ds == DatasetSelector::both;
  if (ds != DatasetSelector::violations) {
    std::string type;
    for (const auto& c : snap.crimes()) {
      type = prefix ? "crime:" : "";
      type += fine_types ? c.ucr_code : std::string(to_string(c.category));
      fn(c.occurrence_at.date, c.npu, type);
    }
  }
  if (ds != DatasetSelector::crimes) {
    std::string type;
    for (const auto& v : snap.violations()) {
      type = prefix ? "violation:" : "";
      type += v.status;
      fn(v.report_date, v.npu, type);
    }
  }
}

}  // namespace

std::string_view to_string(Granularity g)
{
  switch (g) {
    case Granularity::year: return "year";
    case Granularity::quarter: return "quarter";
    case Granularity::month: return "month";
    case Granularity::week: return "week";
    case Granularity::weekday: return "weekday";
    case Granularity::day: return "day";
  }
  return "month";
}

Granularity parse_granularity(std::string_view text)
{
  for (auto g : kAllGranularities) {
    if (to_string(g) == text) return g;
  }
  throw DomainError(ErrorCode::bad_granularity, "unknown granularity '" + std::string(text) +
                                                    "' (expected year, quarter, month, week, weekday, day)");
}

std::string_view to_string(DatasetSelector d)
{
  switch (d) {
    case DatasetSelector::crimes: return "crimes";
    case DatasetSelector::violations: return "violations";
    case DatasetSelector::both: return "both";
  }
  return "crimes";
}

DatasetSelector parse_dataset(std::string_view text)
{
  for (auto d : {DatasetSelector::crimes, DatasetSelector::violations, DatasetSelector::both}) {
    if (to_string(d) == text) return d;
  }
  throw DomainError(ErrorCode::bad_dataset,
                    "unknown dataset '" + std::string(text) + "' (expected crimes, violations, both)");
}

bool is_westside(std::string_view npu_id)
{
  for (const auto& id : kWestsideNpus) {
    if (id == npu_id) return true;
  }
  return false;
}

std::string canonical_npu_id(std::string_view text)
{
  if (text.substr(0, 4) == "NPU-") return std::string(text);
  return "NPU-" + std::string(text);
}

bool Scope::includes(const std::optional<std::string>& npu_tag) const
{
  switch (kind) {
    case Kind::city: return true;
    case Kind::npu: return npu_tag && *npu_tag == npu;
    case Kind::westside: return npu_tag && is_westside(*npu_tag);
  }
  return false;
}

std::string Scope::label() const
{
  switch (kind) {
    case Kind::city: return "city";
    case Kind::westside: return "westside";
    case Kind::npu: return "npu:" + npu;
  }
  return "city";
}

Scope parse_scope(std::string_view text)
{
  if (text.empty() || text == "city") return Scope::city();
  if (text == "westside") return Scope::westside();
  if (text.substr(0, 4) == "npu:") {
    const auto id = text.substr(4);
    if (id.empty()) throw DomainError(ErrorCode::bad_scope, "empty NPU id in scope");
    return Scope::of_npu(id);
  }
  throw DomainError(ErrorCode::bad_scope,
                    "unknown scope '" + std::string(text) + "' (expected city, westside, npu:<id>)");
}

void check_scope(const DataSnapshot& snap, const Scope& scope)
{
  if (scope.kind == Scope::Kind::npu && !snap.find_region(RegionKind::npu, scope.npu)) {
    throw DomainError(ErrorCode::unknown_npu, "no NPU '" + scope.npu + "' in the loaded regions");
  }
}

long long bucket_ordinal(Date d, Granularity g)
{
  const std::chrono::year_month_day ymd{d};
  const long long y = static_cast<int>(ymd.year());
  const long long m = static_cast<unsigned>(ymd.month());
  switch (g) {
    case Granularity::year: return y;
    case Granularity::quarter: return y * 4 + (m - 1) / 3;
    case Granularity::month: return y * 12 + (m - 1);
    case Granularity::week: return floor_div(days_of(d) + 3, 7);  // epoch day 0 is a Thursday
    case Granularity::weekday: return std::chrono::weekday{d}.iso_encoding();
    case Granularity::day: return days_of(d);
  }
  return 0;
}

std::string bucket_label(long long ord, Granularity g)
{
  char buf[24];
  switch (g) {
    case Granularity::year:
      std::snprintf(buf, sizeof buf, "%04lld", ord);
      break;
    case Granularity::quarter:
      std::snprintf(buf, sizeof buf, "%04lld-Q%lld", floor_div(ord, 4), ord - floor_div(ord, 4) * 4 + 1);
      break;
    case Granularity::month:
      std::snprintf(buf, sizeof buf, "%04lld-%02lld", floor_div(ord, 12), ord - floor_div(ord, 12) * 12 + 1);
      break;
    case Granularity::week: {
      const Date monday = from_days(ord * 7 - 3);
      const Date thursday = monday + std::chrono::days{3};
      const int iso_year = year_of(thursday);
      const Date jan1 = make_date(iso_year, 1, 1);
      const long long week = (days_of(thursday) - days_of(jan1)) / 7 + 1;
      std::snprintf(buf, sizeof buf, "%04d-W%02lld", iso_year, week);
      break;
    }
    case Granularity::weekday:
      std::snprintf(buf, sizeof buf, "%lld-%s", ord, kWeekdayNames[(ord - 1) % 7]);
      break;
    case Granularity::day:
      return format_date(from_days(ord));
  }
  return buf;
}

std::string bucket_key(Date d, Granularity g) { return bucket_label(bucket_ordinal(d, g), g); }

std::string bucket_key(const DateTime& t, Granularity g) { return bucket_key(t.date, g); }

long long TimeSeries::total() const
{
  long long sum = 0;
  for (const auto& p : points) sum += p.count;
  return sum;
}

TimeSeries timeseries_for(const DataSnapshot& snap, DatasetSelector ds, const Scope& scope, Granularity g,
                          const DateRange& range)
{
  check_scope(snap, scope);
  std::map<long long, long long> counts;
  for_each_event(snap, ds, false, [&](Date d, const std::optional<std::string>& npu, const std::string&) {
    if (range.contains(d) && scope.includes(npu)) ++counts[bucket_ordinal(d, g)];
  });

  TimeSeries out{g, {}};
  if (counts.empty()) return out;
  const long long first = counts.begin()->first;
  const long long last = counts.rbegin()->first;
  out.points.reserve(static_cast<std::size_t>(last - first + 1));
  for (long long ord = first; ord <= last; ++ord) {
    auto it = counts.find(ord);
    out.points.push_back({bucket_label(ord, g), it == counts.end() ? 0 : it->second});
  }
  return out;
}

TimeSeriesPair timeseries(const DataSnapshot& snap, DatasetSelector ds, const Scope& scope, Granularity g,
                          const DateRange& range)
{
  return {timeseries_for(snap, ds, scope, g, range), timeseries_for(snap, ds, Scope::city(), g, range)};
}

NpuCounts counts_by_npu(const DataSnapshot& snap, DatasetSelector ds, const DateRange& range, bool per_capita)
{
  NpuCounts out;
  out.per_capita = per_capita;
  std::map<std::string, long long> counts;
  for (const auto& id : snap.region_ids(RegionKind::npu)) counts[id] = 0;

  for_each_event(snap, ds, false, [&](Date d, const std::optional<std::string>& npu, const std::string&) {
    if (!range.contains(d)) return;
    ++out.total;
    auto it = npu ? counts.find(*npu) : counts.end();
    if (it == counts.end()) {
      ++out.unjoined;
    } else {
      ++it->second;
    }
  });

  for (const auto& [id, count] : counts) {
    NpuValue v;
    v.npu = id;
    v.name = snap.find_region(RegionKind::npu, id)->name;
    v.count = count;
    v.westside = is_westside(id);
    if (per_capita) {
      const auto pop = snap.population(RegionKind::npu, id);
      if (!pop && count > 0) {
        throw DomainError(ErrorCode::missing_population, "no population for " + id + "; cannot normalize");
      }
      v.value = pop ? static_cast<double>(count) * 1000.0 / static_cast<double>(*pop) : 0.0;
    } else {
      v.value = static_cast<double>(count);
    }
    out.entries.push_back(std::move(v));
  }
  return out;
}

TypeShare type_share(const DataSnapshot& snap, DatasetSelector ds, const Scope& scope, bool fine_types)
{
  check_scope(snap, scope);
  std::map<std::string, long long> counts;
  long long total = 0;
  for_each_event(snap, ds, fine_types, [&](Date, const std::optional<std::string>& npu, const std::string& type) {
    if (!scope.includes(npu)) return;
    ++counts[type];
    ++total;
  });
  TypeShare out;
  for (const auto& [type, count] : counts) out[type] = 100.0 * static_cast<double>(count) / static_cast<double>(total);
  return out;
}

TypeSharePair type_share_pair(const DataSnapshot& snap, DatasetSelector ds, const Scope& scope, bool fine_types)
{
  return {type_share(snap, ds, scope, fine_types), type_share(snap, ds, Scope::city(), fine_types)};
}

DateRange parse_range(std::string_view from, std::string_view to)
{
  DateRange r;
  auto one = [](std::string_view text, const char* which) -> std::optional<Date> {
    if (text.empty()) return std::nullopt;
    auto d = parse_date(text);
    if (!d) throw DomainError(ErrorCode::bad_date, std::string("bad '") + which + "' date '" + std::string(text) + "'");
    return d;
  };
  r.from = one(from, "from");
  r.to = one(to, "to");
  if (r.from && r.to && *r.from > *r.to) throw DomainError(ErrorCode::bad_date, "'from' is after 'to'");
  return r;
}

}  // namespace safetydash
