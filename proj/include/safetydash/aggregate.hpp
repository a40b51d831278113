#pragma once

#include "safetydash/dates.hpp"
#include "safetydash/snapshot.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace safetydash {

enum class Granularity { year, quarter, month, week, weekday, day };

inline constexpr Granularity kAllGranularities[] = {Granularity::year, Granularity::quarter, Granularity::month,
                                                    Granularity::week, Granularity::weekday, Granularity::day};

std::string_view to_string(Granularity g);
/// Throws DomainError(bad_granularity).
Granularity parse_granularity(std::string_view text);

enum class DatasetSelector { crimes, violations, both };

std::string_view to_string(DatasetSelector d);
/// Throws DomainError(bad_dataset).
DatasetSelector parse_dataset(std::string_view text);

inline const std::vector<std::string> kWestsideNpus = {"NPU-K", "NPU-L", "NPU-T"};

bool is_westside(std::string_view npu_id);

/// "K" and "NPU-K" both name NPU-K.
std::string canonical_npu_id(std::string_view text);

struct Scope {
  enum class Kind { city, npu, westside };
  Kind kind = Kind::city;
  std::string npu;  // canonical id, only for Kind::npu

  static Scope city() { return {}; }
  static Scope westside() { return {Kind::westside, {}}; }
  static Scope of_npu(std::string_view id) { return {Kind::npu, canonical_npu_id(id)}; }

  bool includes(const std::optional<std::string>& npu_tag) const;
  std::string label() const;

  friend bool operator==(const Scope&, const Scope&) = default;
};

/// "city" | "westside" | "npu:<id>". Throws DomainError(bad_scope).
Scope parse_scope(std::string_view text);

/// Throws DomainError(unknown_npu) for an npu scope the snapshot lacks.
void check_scope(const DataSnapshot& snap, const Scope& scope);

/// Integral position of the bucket containing d; consecutive buckets differ by 1.
long long bucket_ordinal(Date d, Granularity g);
std::string bucket_label(long long ordinal, Granularity g);
std::string bucket_key(const DateTime& t, Granularity g);
std::string bucket_key(Date d, Granularity g);

struct SeriesPoint {
  std::string label;
  long long count = 0;

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

struct TimeSeries {
  Granularity granularity = Granularity::month;
  std::vector<SeriesPoint> points;

  long long total() const;
  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;
};

struct TimeSeriesPair {
  TimeSeries scope_series;
  TimeSeries city_series;

  friend bool operator==(const TimeSeriesPair&, const TimeSeriesPair&) = default;
};

/// Crimes count by occurrence date, violations by report date. Zero buckets
/// are filled between the first and last occupied bucket of each series.
TimeSeries timeseries_for(const DataSnapshot& snap, DatasetSelector ds, const Scope& scope, Granularity g,
                          const DateRange& range = {});
TimeSeriesPair timeseries(const DataSnapshot& snap, DatasetSelector ds, const Scope& scope, Granularity g,
                          const DateRange& range = {});

struct NpuValue {
  std::string npu;
  std::string name;
  long long count = 0;
  double value = 0.0;  // count, or count per 1,000 residents
  bool westside = false;

  friend bool operator==(const NpuValue&, const NpuValue&) = default;
};

struct NpuCounts {
  std::vector<NpuValue> entries;  // ordered by NPU id
  bool per_capita = false;
  long long unjoined = 0;         // in-range records without an NPU tag
  long long total = 0;            // all in-range records

  friend bool operator==(const NpuCounts&, const NpuCounts&) = default;
};

/// Throws DomainError(missing_population) when per_capita and a counted NPU
/// has no population.
NpuCounts counts_by_npu(const DataSnapshot& snap, DatasetSelector ds, const DateRange& range, bool per_capita);

using TypeShare = std::map<std::string, double>;

struct TypeSharePair {
  TypeShare scope_shares;
  TypeShare city_shares;

  friend bool operator==(const TypeSharePair&, const TypeSharePair&) = default;
};

/// Percent of the scope total per type: crime category (or UCR code with
/// fine_types), violation status. With `both`, keys are prefixed "crime:" and
/// "violation:".
TypeShare type_share(const DataSnapshot& snap, DatasetSelector ds, const Scope& scope, bool fine_types = false);
TypeSharePair type_share_pair(const DataSnapshot& snap, DatasetSelector ds, const Scope& scope,
                              bool fine_types = false);

// Date range parsed from optional from= / to= strings. Throws DomainError(bad_date).
DateRange parse_range(std::string_view from, std::string_view to);

}  // namespace safetydash
