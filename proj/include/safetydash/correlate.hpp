#pragma once

#include "safetydash/records.hpp"
#include "safetydash/snapshot.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace safetydash {

inline constexpr std::string_view kCorrelationCaveat = "correlation does not necessarily imply causation";

/// Pearson's r. Throws DomainError(bad_param) for mismatched lengths or fewer
/// than two samples, DomainError(undefined_correlation) when either input has
/// zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct CrimeMeasure {
  enum class Kind { violent_pct, total_per_1000, category_per_1000 };
  Kind kind = Kind::violent_pct;
  CrimeCategory category = CrimeCategory::violent;  // for category_per_1000

  std::string label() const;
  friend bool operator==(const CrimeMeasure&, const CrimeMeasure&) = default;
};

/// "violent_pct" | "total_per_1000" | "<category>_per_1000". Throws DomainError(bad_measure).
CrimeMeasure parse_measure(std::string_view text);

enum class CorrelationScope { city, westside };

std::string_view to_string(CorrelationScope s);
/// Throws DomainError(bad_scope).
CorrelationScope parse_correlation_scope(std::string_view text);

/// Crimes tagged with the neighborhood. nullopt when the denominator is zero
/// (no crimes for violent_pct, no population for per-1,000 measures).
/// Throws DomainError(unknown_neighborhood).
std::optional<double> crime_measure(const DataSnapshot& snap, const std::string& neighborhood, const CrimeMeasure& m);

struct CorrelationResult {
  std::string factor;
  CrimeMeasure measure;
  CorrelationScope scope = CorrelationScope::city;
  std::optional<double> r;  // nullopt: undefined (zero variance or n < 2)
  int n = 0;                // neighborhoods used
  int excluded = 0;         // neighborhoods missing the factor or the measure

  friend bool operator==(const CorrelationResult&, const CorrelationResult&) = default;
};

/// Neighborhood ids in scope: all of them for city, those whose interior
/// lies in NPU K, L, or T for westside.
std::vector<std::string> scope_neighborhoods(const DataSnapshot& snap, CorrelationScope scope);

/// Correlates each factor (all census factors when `factors` is empty) with
/// the measure across neighborhoods using pairwise deletion. Sorted by |r|
/// descending then name; undefined results last. Throws
/// DomainError(insufficient_neighborhoods) when fewer than two neighborhoods in
/// scope have the measure, DomainError(bad_param) for unknown factors.
std::vector<CorrelationResult> correlate_factors(const DataSnapshot& snap, const std::vector<std::string>& factors,
                                                 const CrimeMeasure& m, CorrelationScope scope);

/// Expands "group.*" (or "group.") entries to every factor with that prefix.
std::vector<std::string> expand_factors(const DataSnapshot& snap, const std::vector<std::string>& requested);

}  // namespace safetydash
