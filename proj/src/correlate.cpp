#include "safetydash/correlate.hpp"

#include "safetydash/aggregate.hpp"
#include "safetydash/error.hpp"

#include <algorithm>
#include <cmath>

namespace safetydash {

namespace {

bool constant(std::span<const double> v)
{
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

double pearson(std::span<const double> xs, std::span<const double> ys)
{
  if (xs.size() != ys.size()) throw DomainError(ErrorCode::bad_param, "pearson: length mismatch");
  if (xs.size() < 2) throw DomainError(ErrorCode::bad_param, "pearson: need at least two samples");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw DomainError(ErrorCode::bad_param, "pearson: non-finite input");
  }
  if (constant(xs) || constant(ys)) throw DomainError(ErrorCode::undefined_correlation, "pearson: zero variance");

  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DomainError(ErrorCode::undefined_correlation, "pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::string CrimeMeasure::label() const
{
  switch (kind) {
    case Kind::violent_pct: return "violent_pct";
    case Kind::total_per_1000: return "total_per_1000";
    case Kind::category_per_1000: return std::string(to_string(category)) + "_per_1000";
  }
  return "violent_pct";
}

CrimeMeasure parse_measure(std::string_view text)
{
  if (text.empty() || text == "violent_pct") return {};
  if (text == "total_per_1000") return {CrimeMeasure::Kind::total_per_1000, CrimeCategory::violent};
  constexpr std::string_view suffix = "_per_1000";
  if (text.size() > suffix.size() && text.substr(text.size() - suffix.size()) == suffix) {
    if (auto cat = parse_category(text.substr(0, text.size() - suffix.size()))) {
      return {CrimeMeasure::Kind::category_per_1000, *cat};
    }
  }
  throw DomainError(ErrorCode::bad_measure, "unknown measure '" + std::string(text) +
                                                "' (expected violent_pct, total_per_1000, <category>_per_1000)");
}

std::string_view to_string(CorrelationScope s) { return s == CorrelationScope::city ? "city" : "westside"; }

CorrelationScope parse_correlation_scope(std::string_view text)
{
  if (text.empty() || text == "city") return CorrelationScope::city;
  if (text == "westside") return CorrelationScope::westside;
  throw DomainError(ErrorCode::bad_scope, "correlation scope must be city or westside");
}

std::optional<double> crime_measure(const DataSnapshot& snap, const std::string& neighborhood, const CrimeMeasure& m)
{
  if (!snap.find_region(RegionKind::neighborhood, neighborhood)) {
    throw DomainError(ErrorCode::unknown_neighborhood, "no neighborhood '" + neighborhood + "'");
  }
  long long total = 0;
  long long matching = 0;
  const CrimeCategory target = m.kind == CrimeMeasure::Kind::category_per_1000 ? m.category : CrimeCategory::violent;
  for (const auto& c : snap.crimes()) {
    if (!c.neighborhood || *c.neighborhood != neighborhood) continue;
    ++total;
    if (c.category == target) ++matching;
  }
  switch (m.kind) {
    case CrimeMeasure::Kind::violent_pct:
      if (total == 0) return std::nullopt;
      return 100.0 * static_cast<double>(matching) / static_cast<double>(total);
    case CrimeMeasure::Kind::total_per_1000:
    case CrimeMeasure::Kind::category_per_1000: {
      const auto pop = snap.population(RegionKind::neighborhood, neighborhood);
      if (!pop) return std::nullopt;
      const long long count = m.kind == CrimeMeasure::Kind::total_per_1000 ? total : matching;
      return static_cast<double>(count) * 1000.0 / static_cast<double>(*pop);
    }
  }
  return std::nullopt;
}

std::vector<std::string> scope_neighborhoods(const DataSnapshot& snap, CorrelationScope scope)
{
  std::vector<std::string> out;
  for (const auto& id : snap.region_ids(RegionKind::neighborhood)) {
    if (scope == CorrelationScope::westside) {
      auto npu = snap.npu_of_neighborhood(id);
      if (!npu || !is_westside(*npu)) continue;
    }
    out.push_back(id);
  }
  return out;
}

std::vector<std::string> expand_factors(const DataSnapshot& snap, const std::vector<std::string>& requested)
{
  const auto& known = snap.census_factors();
  if (requested.empty()) return known;
  std::vector<std::string> out;
  auto add = [&](const std::string& f) {
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  };
  for (const auto& req : requested) {
    std::string prefix;
    if (req.size() >= 2 && req.substr(req.size() - 2) == ".*") {
      prefix = req.substr(0, req.size() - 1);
    } else if (!req.empty() && req.back() == '.') {
      prefix = req;
    }
    if (!prefix.empty()) {
      bool any = false;
      for (const auto& f : known) {
        if (f.compare(0, prefix.size(), prefix) == 0) {
          add(f);
          any = true;
        }
      }
      if (!any) throw DomainError(ErrorCode::bad_param, "no census factors in group '" + req + "'");
    } else {
      if (std::find(known.begin(), known.end(), req) == known.end()) {
        throw DomainError(ErrorCode::bad_param, "unknown census factor '" + req + "'");
      }
      add(req);
    }
  }
  return out;
}

std::vector<CorrelationResult> correlate_factors(const DataSnapshot& snap, const std::vector<std::string>& factors,
                                                 const CrimeMeasure& m, CorrelationScope scope)
{
  const auto names = expand_factors(snap, factors);
  const auto hoods = scope_neighborhoods(snap, scope);

  std::vector<std::optional<double>> measure;
  measure.reserve(hoods.size());
  int usable = 0;
  for (const auto& id : hoods) {
    measure.push_back(crime_measure(snap, id, m));
    usable += measure.back() ? 1 : 0;
  }
  if (usable < 2) {
    throw DomainError(ErrorCode::insufficient_neighborhoods,
                      "only " + std::to_string(usable) + " neighborhood(s) in " + std::string(to_string(scope)) +
                          " have a value for " + m.label() + "; need at least 2");
  }

  std::vector<CorrelationResult> out;
  for (const auto& name : names) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < hoods.size(); ++i) {
      const auto* profile = snap.census_for(RegionKind::neighborhood, hoods[i]);
      if (!measure[i] || !profile) continue;
      auto it = profile->factors.find(name);
      if (it == profile->factors.end()) continue;
      xs.push_back(it->second);
      ys.push_back(*measure[i]);
    }
    CorrelationResult res;
    res.factor = name;
    res.measure = m;
    res.scope = scope;
    res.n = static_cast<int>(xs.size());
    res.excluded = static_cast<int>(hoods.size()) - res.n;
    if (xs.size() >= 2) {
      try {
        res.r = pearson(xs, ys);
      } catch (const DomainError& e) {
        if (e.code() != ErrorCode::undefined_correlation) throw;
      }
    }
    out.push_back(std::move(res));
  }

  std::stable_sort(out.begin(), out.end(), [](const CorrelationResult& a, const CorrelationResult& b) {
    if (a.r.has_value() != b.r.has_value()) return a.r.has_value();
    if (a.r && std::abs(*a.r) != std::abs(*b.r)) return std::abs(*a.r) > std::abs(*b.r);
    return a.factor < b.factor;
  });
  return out;
}

}  // namespace safetydash
