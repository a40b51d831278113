// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "../support/facade.hpp"
#include "../support/oracles.hpp"
#include "../support/polygons.hpp"
#include "../support/service.hpp"
#include "../support/world.hpp"

#include "safetydash/aggregate.hpp"
#include "safetydash/correlate.hpp"
#include "safetydash/maplayer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace safetydash;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned limits.
constexpr double kLogBinSeconds = 1.0;
constexpr double kHexmapSeconds = 5.0;
constexpr double kGeometrySeconds = 5.0;
constexpr double kJoinSeconds = 10.0;
constexpr double kSuiteSeconds = 60.0;
constexpr double kOffBoundaryEps = 1e-9;
constexpr double kPearsonTol = 1e-12;
constexpr double kShareTol = 1e-9;
constexpr long long kMissingTarget = 110;
constexpr long long kMissingTolerance = 20;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what)
  {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void criterion(const std::string& name, const std::function<Outcome()>& body)
{
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  failures += !o.ok;
  std::printf("%s  %-28s %7.3fs  %s\n", o.ok ? "PASS" : "FAIL", name.c_str(), seconds_since(t0), o.detail.c_str());
  std::fflush(stdout);
}

// Counts addresses handed to the wrapped geocoder.
class CountingGeocoder final : public Geocoder {
 public:
  explicit CountingGeocoder(Geocoder& inner) : inner_(inner) {}
  std::optional<GeoPoint> geocode(std::string_view address) override
  {
    ++calls;
    return inner_.geocode(address);
  }
  long long calls = 0;

 private:
  Geocoder& inner_;
};

Outcome log_bins()
{
  Outcome o;
  const long long counts[] = {1, 2, 10, 11, 100, 101, 1000, 1001};
  const int classes[] = {1, 2, 2, 3, 3, 4, 4, 5};
  for (int i = 0; i < 8; ++i) o.require(color_class(counts[i]) == classes[i], "class of " + std::to_string(counts[i]));
  const auto t0 = Clock::now();
  int prev = 1;
  for (long long n = 1; n <= 1'000'000; ++n) {
    const int c = color_class(n);
    o.require(c >= prev && c == oracle::log_class(n), "exhaustive mismatch at " + std::to_string(n));
    prev = c;
  }
  const double s = seconds_since(t0);
  o.require(s < kLogBinSeconds, "exhaustive check took " + std::to_string(s) + " s");
  if (o.ok) o.detail = "8 examples, 1..10^6 monotone and closed-form";
  return o;
}

// Filter matching written out directly from the record fields.
bool passes(const CrimeRecord& c, const std::string& span, const std::set<std::string>& cats, const std::set<std::string>& codes)
{
  const std::string day = format_date(c.occurrence_at.date);
  if (!span.empty() && day.compare(0, span.size(), span) != 0) return false;
  if (!cats.empty() && !cats.count(std::string(to_string(c.category)))) return false;
  if (!codes.empty() && !codes.count(c.ucr_code)) return false;
  return true;
}

Outcome hexmap_conservation(const DataSnapshot& snap)
{
  Outcome o;
  struct Spec {
    std::string span, cats, codes;
    std::set<std::string> cat_set, code_set;
  };
  std::vector<Spec> specs;
  for (const char* span : {"", "2008", "2011", "2015", "2013-07"}) {
    specs.push_back({span, "", "", {}, {}});
    specs.push_back({span, "violent", "", {"violent"}, {}});
    specs.push_back({span, "theft,drugs_alcohol", "", {"theft", "drugs_alcohol"}, {}});
    specs.push_back({span, "", "04,05", {}, {"04", "05"}});
  }
  const auto cfg = default_grid(snap);
  const auto t0 = Clock::now();
  for (const auto& sp : specs) {
    const auto f = parse_crime_filter(sp.span, sp.cats, sp.codes);
    long long expect = 0;
    for (const auto& c : snap.crimes()) expect += c.location && passes(c, sp.span, sp.cat_set, sp.code_set);
    long long sum = 0;
    for (const auto& h : build_hexmap(snap, f, cfg)) sum += h.count;
    o.require(sum == expect, "filter " + f.key() + ": " + std::to_string(sum) + " != " + std::to_string(expect));
  }
  const double s = seconds_since(t0);
  o.require(s < kHexmapSeconds, "took " + std::to_string(s) + " s");
  o.require(snap.crimes().size() == 10000, "fixture does not have 10,000 crimes");
  if (o.ok) o.detail = std::to_string(specs.size()) + " filters over 10,000 crimes";
  return o;
}

Outcome geometry_oracle()
{
  Outcome o;
  const auto polys = testgeo::oracle_polygons();
  std::mt19937_64 gen(2024);
  std::size_t checked = 0;
  const auto t0 = Clock::now();
  for (const auto& poly : polys) {
    const auto b = poly.bbox();
    std::uniform_real_distribution<double> lat(b.min_lat - 0.25, b.max_lat + 0.25), lon(b.min_lon - 0.25, b.max_lon + 0.25);
    for (int i = 0; i < 2000; ++i) {
      const GeoPoint p{lat(gen), lon(gen)};
      if (oracle::boundary_distance(p, poly) <= kOffBoundaryEps) continue;
      ++checked;
      o.require(point_in_polygon(p, poly) == oracle::contains(p, poly), "disagreement on " + poly.id);
    }
  }
  const double s = seconds_since(t0);
  o.require(checked >= 1000, "too few points checked");
  o.require(s < kGeometrySeconds, "took " + std::to_string(s) + " s");
  if (o.ok) o.detail = std::to_string(checked) + " points over " + std::to_string(polys.size()) + " polygons (concave, holed, multi)";
  return o;
}

Outcome join_equivalence(const DataSnapshot& snap)
{
  Outcome o;
  for (const auto& c : snap.crimes()) {
    if (!c.location) continue;
    o.require(c.npu == oracle::brute_force_assign(*c.location, snap.regions(), RegionKind::npu), "fixture npu mismatch at " + c.id);
    o.require(c.neighborhood == oracle::brute_force_assign(*c.location, snap.regions(), RegionKind::neighborhood),
              "fixture neighborhood mismatch at " + c.id);
  }

  std::vector<GeoRegion> regions;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 5; ++j) {
      auto s = testgeo::star(33.6 + i * 0.05, -84.55 + j * 0.05, 0.03, 0.012);
      s.id = "R" + std::to_string(i * 5 + j);
      regions.push_back(std::move(s));
    }
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> lat(33.55, 33.95), lon(-84.6, -84.3);
  std::vector<CrimeRecord> points(1'000'000);
  for (std::size_t i = 0; i < points.size(); ++i) points[i].location = GeoPoint{lat(gen), lon(gen)};

  const auto t0 = Clock::now();
  const auto unjoined = spatial_join(points, regions);
  const double s = seconds_since(t0);
  o.require(s < kJoinSeconds, "1M-point join took " + std::to_string(s) + " s");
  o.require(unjoined < points.size(), "nothing joined");
  for (std::size_t i = 0; i < points.size(); i += 50) {
    o.require(points[i].npu == oracle::brute_force_assign(*points[i].location, regions, RegionKind::npu), "synthetic mismatch");
  }
  if (o.ok) {
    std::ostringstream d;
    d.precision(3);
    d << "fixture equal to brute force; 1M points vs 30 polygons in " << s << " s";
    o.detail = d.str();
  }
  return o;
}

Outcome pearson_checks()
{
  Outcome o;
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y, z;
  for (double v : x) {
    y.push_back(2 * v + 3);
    z.push_back(-v);
  }
  o.require(std::abs(pearson(x, y) - 1.0) <= kPearsonTol, "r(x, 2x+3)");
  o.require(std::abs(pearson(x, z) + 1.0) <= kPearsonTol, "r(x, -x)");
  const std::vector<double> a{1, 2, 3, 4}, b{1, 3, 2, 4};
  o.require(std::abs(pearson(a, b) - 0.8) <= kPearsonTol, "four-point example");

  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd(0, 3);
  std::uniform_real_distribution<double> coef(0.2, 4), shift(-50, 50);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> u(12), v(12), au(12), bv(12);
    const double a1 = coef(gen), b1 = shift(gen), a2 = -coef(gen), b2 = shift(gen);
    for (int i = 0; i < 12; ++i) {
      u[i] = nd(gen);
      v[i] = u[i] * 0.5 + nd(gen);
      au[i] = a1 * u[i] + b1;
      bv[i] = a2 * v[i] + b2;
    }
    const double r = pearson(u, v);
    o.require(std::abs(r - static_cast<double>(oracle::pearson(u, v))) <= 1e-12, "oracle disagreement");
    o.require(std::abs(pearson(au, bv) + r) <= 1e-9, "affine invariance");
  }
  if (o.ok) o.detail = "3 examples within 1e-12, 100 affine cases";
  return o;
}

Outcome calendar(const DataSnapshot& snap)
{
  Outcome o;
  int cells = 0;
  for (const auto& row : oracle::kCalendarTable) {
    const Date d = make_date(row.y, row.m, row.d);
    for (int g = 0; g < 6; ++g) {
      o.require(bucket_key(d, kAllGranularities[g]) == row.labels[g], std::string("table cell ") + row.labels[g]);
      ++cells;
    }
  }
  for (auto g : kAllGranularities) {
    for (auto ds : {DatasetSelector::crimes, DatasetSelector::violations}) {
      const auto s = timeseries_for(snap, ds, Scope::city(), g);
      const auto n = ds == DatasetSelector::crimes ? snap.crimes().size() : snap.violations().size();
      o.require(s.total() == static_cast<long long>(n), "partition at granularity " + std::string(to_string(g)));
    }
  }
  if (o.ok) o.detail = std::to_string(cells) + " table cells; partition at 6 granularities";
  return o;
}

Outcome westside(const DataSnapshot& snap)
{
  Outcome o;
  for (auto ds : {DatasetSelector::crimes, DatasetSelector::violations}) {
    for (auto g : kAllGranularities) {
      std::map<std::string, long long> west, sum;
      for (const auto& p : timeseries_for(snap, ds, Scope::westside(), g).points) west[p.label] = p.count;
      for (const auto& id : kWestsideNpus)
        for (const auto& p : timeseries_for(snap, ds, Scope::of_npu(id), g).points) sum[p.label] += p.count;
      for (const auto& [k, v] : sum)
        if (v) o.require(west[k] == v, "bucket " + k);
      for (const auto& [k, v] : west) o.require(sum[k] == v, "bucket " + k);
    }
  }
  for (auto ds : {DatasetSelector::crimes, DatasetSelector::violations, DatasetSelector::both})
    for (const auto& scope : {Scope::city(), Scope::westside(), Scope::of_npu("K")})
      for (bool fine : {false, true}) {
        double total = 0;
        for (const auto& [k, v] : type_share(snap, ds, scope, fine)) total += v;
        o.require(std::abs(total - 100.0) <= kShareTol, "type_share sum " + std::to_string(total));
      }
  if (o.ok) o.detail = "K+L+T bucket-wise at 6 granularities; shares sum to 100";
  return o;
}

Outcome missing_coordinates()
{
  Outcome o;
  testworld::TempDir dir;
  const auto summary = generate_fixture(FixtureOptions{}, dir.path().string());
  const long long missing = static_cast<long long>(summary.crimes_without_coordinates);
  o.require(summary.crimes == 10000, "fixture size");
  o.require(std::abs(missing - kMissingTarget) <= kMissingTolerance, "missing = " + std::to_string(missing));
  StubGeocoder stub(fixture_city_bounds());
  CountingGeocoder counting(stub);
  const auto outcome = ingest_files(testworld::sources_in(dir.path().string()), UcrTable::defaults(), counting);
  const auto& r = outcome.snapshot.report();
  o.require(r.crimes.geocoded == missing, "geocoded != missing");
  o.require(r.crimes.geocode_failed == 0, "geocode failures");
  long long attempts = 0;
  for (const auto* d : {&r.crimes, &r.violations, &r.assets}) attempts += d->geocoded + d->geocode_failed;
  o.require(counting.calls == attempts, "geocoder calls do not match the attempts in the report");
  o.require(r.crimes.parsed == r.crimes.located + r.crimes.geocode_failed, "crimes do not reconcile");
  for (const auto* d : {&r.crimes, &r.violations, &r.assets, &r.census}) o.require(d->reconciles(), "report does not reconcile");
  o.require(r.crimes.row_errors == 0, "row errors");
  if (o.ok) o.detail = std::to_string(missing) + " coordinate-less rows, all geocoded by the stub";
  return o;
}

Outcome facade(const std::shared_ptr<const DataSnapshot>& snap, Clock::time_point start)
{
  Outcome o;
  Api api(snap);
  testservice::RunningServer server(api);
  auto client = server.client();
  const auto matrix = testservice::parameter_matrix(*snap);
  for (const auto& c : matrix) {
    const auto r = testservice::fetch(client, c.path, c.params);
    const auto where = c.path + testservice::query_string(c.params);
    o.require(r.status == 200, where + " status " + std::to_string(r.status));
    if (r.status != 200) continue;
    o.require(testservice::equals_library(*snap, c, r.json), where + " differs from the library result");
    o.require(testservice::schema_errors(r.json, testservice::schema_for(c.path)).empty(), where + " violates its schema");
  }
  const double s = seconds_since(start);
  o.require(s < kSuiteSeconds, "acceptance run took " + std::to_string(s) + " s");
  if (o.ok) {
    std::ostringstream d;
    d.precision(3);
    d << matrix.size() << " requests over 9 endpoints; acceptance run " << s << " s";
    o.detail = d.str();
  }
  return o;
}

}  // namespace

int main()
{
  const auto start = Clock::now();
  const auto& fx = testworld::fixture();
  const auto& snap = *fx.snapshot;

  criterion("log-bin conformance", log_bins);
  criterion("hexmap conservation", [&] { return hexmap_conservation(snap); });
  criterion("geometry oracle", geometry_oracle);
  criterion("spatial join", [&] { return join_equivalence(snap); });
  criterion("pearson", pearson_checks);
  criterion("calendar bucketing", [&] { return calendar(snap); });
  criterion("westside identity", [&] { return westside(snap); });
  criterion("missing-coordinate path", missing_coordinates);
  criterion("facade equivalence", [&] { return facade(fx.snapshot, start); });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
