#include "safetydash/fixture.hpp"

#include "safetydash/csv.hpp"
#include "safetydash/dates.hpp"
#include "safetydash/error.hpp"
#include "safetydash/geojson.hpp"
#include "safetydash/ucr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <span>

namespace safetydash {

namespace {

constexpr double kMinLat = 33.65;
constexpr double kMaxLat = 33.89;
constexpr double kMinLon = -84.55;
constexpr double kMaxLon = -84.29;
constexpr int kGrid = 5;
constexpr const char* kNpuLetters = "ABCDEFGHIJKLMNOPQRSTVWXYZ";  // 25 letters, no U

// Platform-independent draws on top of mt19937_64 (std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : gen_() % n; }
  bool chance(double p) { return uniform() < p; }

  std::size_t weighted(std::span<const double> weights)
  {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double x = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (x < weights[i]) return i;
      x -= weights[i];
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 gen_;
};

struct Hood {
  std::string id;
  std::string name;
  std::string npu;
  BBox box;
  long long population = 0;
  double violent_share = 0.0;
  double weight = 0.0;
};

struct Npu {
  std::string id;
  char letter;
  BBox box;
  bool westside = false;
};

Ring rect_ring(const BBox& b)
{
  return {{b.min_lat, b.min_lon}, {b.min_lat, b.max_lon}, {b.max_lat, b.max_lon}, {b.max_lat, b.min_lon}, {b.min_lat, b.min_lon}};
}

std::string fmt_coord(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt_num(double v, int decimals)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string fmt_us(Date d, std::optional<std::chrono::seconds> t)
{
  const std::chrono::year_month_day ymd{d};
  char buf[40];
  if (!t) {
    std::snprintf(buf, sizeof buf, "%02u/%02u/%04d", static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(ymd.year()));
    return buf;
  }
  const long long s = t->count();
  const long long h24 = s / 3600;
  const long long h12 = h24 % 12 == 0 ? 12 : h24 % 12;
  std::snprintf(buf, sizeof buf, "%02u/%02u/%04d %lld:%02lld %s", static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(ymd.year()), h12, s / 60 % 60,
                h24 < 12 ? "AM" : "PM");
  return buf;
}

std::string fmt_iso(Date d, std::optional<std::chrono::seconds> t)
{
  if (!t) return format_date(d);
  // minutes resolution, like the US form, so both spellings parse to one value
  return format_date(d) + "T" + format_time(std::chrono::seconds{t->count() / 60 * 60}).substr(0, 5);
}

const char* const kStreets[] = {"Joseph E Lowery", "Martin Luther King Jr", "Marietta", "Simpson", "Northside",
                                "Peachtree", "Ralph David Abernathy", "Donald Lee Hollowell", "Lee", "Cascade",
                                "Hightower", "Westview", "Sunset", "Mayson Turner", "Chappell"};
const char* const kSuffixes[] = {"St", "Ave", "Blvd", "Dr", "Rd", "Pkwy"};
const char* const kQuadrants[] = {"NW", "SW", "NE", "SE"};

std::string address(Rng& rng)
{
  const auto number = 100 + rng.below(4800);
  const char* street = kStreets[rng.below(std::size(kStreets))];
  const char* suffix = kSuffixes[rng.below(std::size(kSuffixes))];
  const char* quadrant = kQuadrants[rng.below(std::size(kQuadrants))];
  return std::to_string(number) + " " + street + " " + suffix + " " + quadrant + ", Atlanta, GA";
}

GeoPoint point_in(Rng& rng, const BBox& b)
{
  // Keep a margin so generated points never sit on a shared edge.
  const double mlat = (b.max_lat - b.min_lat) * 1e-4;
  const double mlon = (b.max_lon - b.min_lon) * 1e-4;
  return {rng.uniform(b.min_lat + mlat, b.max_lat - mlat), rng.uniform(b.min_lon + mlon, b.max_lon - mlon)};
}

std::ofstream open_out(const std::filesystem::path& p)
{
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + p.string() + "'");
  return out;
}

}  // namespace

BBox fixture_city_bounds() { return {kMinLat, kMinLon, kMaxLat, kMaxLon}; }

FixtureSummary generate_fixture(const FixtureOptions& opt, const std::string& dir_path)
{
  namespace fs = std::filesystem;
  const fs::path dir(dir_path);
  fs::create_directories(dir);
  Rng rng(opt.seed);
  FixtureSummary summary;

  // Geography: a 5x5 NPU grid over the city box, each NPU split into west and
  // east neighborhoods.
  std::vector<Npu> npus;
  std::vector<Hood> hoods;
  const double dlat = (kMaxLat - kMinLat) / kGrid;
  const double dlon = (kMaxLon - kMinLon) / kGrid;
  for (int row = 0; row < kGrid; ++row) {
    for (int col = 0; col < kGrid; ++col) {
      Npu n;
      n.letter = kNpuLetters[row * kGrid + col];
      n.id = std::string("NPU-") + n.letter;
      n.westside = n.letter == 'K' || n.letter == 'L' || n.letter == 'T';
      n.box = {kMaxLat - (row + 1) * dlat, kMinLon + col * dlon, kMaxLat - row * dlat, kMinLon + (col + 1) * dlon};
      if (row == kGrid - 1) n.box.min_lat = kMinLat;
      if (col == kGrid - 1) n.box.max_lon = kMaxLon;
      const double mid = 0.5 * (n.box.min_lon + n.box.max_lon);
      for (int half = 0; half < 2; ++half) {
        Hood h;
        const char lower = static_cast<char>(n.letter - 'A' + 'a');
        h.id = std::string(1, lower) + (half == 0 ? "-west" : "-east");
        h.name = std::string("NPU ") + n.letter + (half == 0 ? " West" : " East");
        h.npu = n.id;
        h.box = n.box;
        (half == 0 ? h.box.max_lon : h.box.min_lon) = mid;
        h.population = 2000 + static_cast<long long>(rng.below(13000));
        h.violent_share = rng.uniform(0.08, 0.30) + (n.westside ? 0.12 : 0.0);
        h.weight = rng.uniform(0.5, 1.5) * (n.westside ? 2.5 : 1.0) * static_cast<double>(h.population) / 8000.0;
        hoods.push_back(std::move(h));
      }
      npus.push_back(std::move(n));
    }
  }
  summary.npus = npus.size();
  summary.neighborhoods = hoods.size();

  {
    std::vector<GeoRegion> regions;
    GeoRegion city{"atlanta", RegionKind::city, "City of Atlanta", {{rect_ring(fixture_city_bounds())}}, 0};
    for (const auto& h : hoods) city.population += h.population;
    regions.push_back(city);
    for (const auto& n : npus) {
      long long pop = 0;
      for (const auto& h : hoods)
        if (h.npu == n.id) pop += h.population;
      regions.push_back({n.id, RegionKind::npu, std::string("NPU ") + n.letter, {{rect_ring(n.box)}}, pop});
    }
    for (const auto& h : hoods) {
      regions.push_back({h.id, RegionKind::neighborhood, h.name, {{rect_ring(h.box)}}, h.population});
    }
    auto out = open_out(dir / "regions.geojson");
    out << regions_collection(regions).dump(1) << '\n';
  }

  {
    auto out = open_out(dir / "ucr_categories.txt");
    out << UcrTable::defaults().to_text();
  }

  // Crimes.
  {
    const std::vector<std::string> violent_codes{"01A", "02", "03", "04"};
    const std::vector<double> violent_w{0.5, 1.0, 4.0, 5.0};
    const std::vector<std::string> other_codes{"05", "06", "07", "09", "11", "13", "14", "16", "17", "18", "21", "22", "23", "26", "08"};
    const std::vector<double> other_w{10.0, 25.0, 8.0, 10.0, 5.0, 1.0, 8.0, 1.5, 1.5, 8.0, 2.0, 1.0, 1.5, 5.0, 0.5};
    std::vector<double> hood_w;
    for (const auto& h : hoods) hood_w.push_back(h.weight);

    const auto missing_count =
        static_cast<std::size_t>(std::llround(static_cast<double>(opt.crimes) * kMissingCoordinateRatio));
    std::vector<std::size_t> order(opt.crimes);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < missing_count && i < order.size(); ++i) {
      std::swap(order[i], order[i + rng.below(order.size() - i)]);
    }
    std::vector<bool> missing(opt.crimes, false);
    for (std::size_t i = 0; i < missing_count && i < order.size(); ++i) missing[order[i]] = true;

    const Date first = make_date(2008, 1, 1);
    const long long span_days = (make_date(2015, 12, 31) - first).count() + 1;

    auto out = open_out(dir / "crimes.csv");
    csv::write_row(out, {"id", "report_date", "occurrence_date", "address", "ucr_code", "lat", "lon"});
    for (std::size_t i = 0; i < opt.crimes; ++i) {
      const Hood& h = hoods[rng.weighted(hood_w)];
      const bool violent = rng.chance(h.violent_share);
      const std::string& code =
          violent ? violent_codes[rng.weighted(violent_w)] : other_codes[rng.weighted(other_w)];
      const Date occ = first + std::chrono::days{static_cast<long long>(rng.below(span_days))};
      const auto lag_a = rng.below(4);
      const auto lag_b = rng.below(3);
      const Date rep = occ + std::chrono::days{static_cast<long long>(lag_a * lag_b)};
      const std::chrono::seconds tod{static_cast<long long>(rng.below(86400))};
      const bool us = rng.chance(0.3);
      const GeoPoint p = point_in(rng, h.box);
      const std::string addr = address(rng);
      char id[24];
      std::snprintf(id, sizeof id, "C%08zu", i + 1);
      std::vector<std::string> row{id, us ? fmt_us(rep, std::nullopt) : fmt_iso(rep, std::nullopt),
                                   us ? fmt_us(occ, tod) : fmt_iso(occ, tod), addr, code};
      if (missing[i]) {
        row.insert(row.end(), {"", ""});
        ++summary.crimes_without_coordinates;
      } else {
        row.insert(row.end(), {fmt_coord(p.lat), fmt_coord(p.lon)});
      }
      csv::write_row(out, row);
    }
    summary.crimes = opt.crimes;
  }

  // Code violations: no coordinate columns, as in the municipal export.
  {
    const std::vector<std::string> statuses{"Open", "Closed", "In Compliance", "Pending Court", "Demolished"};
    const std::vector<double> status_w{30.0, 40.0, 15.0, 10.0, 5.0};
    const Date first = make_date(2011, 1, 1);
    const long long span_days = (make_date(2016, 3, 31) - first).count() + 1;
    auto flag = [&rng] { return rng.chance(0.05) ? std::string{} : std::string(rng.chance(0.4) ? "Y" : "N"); };
    auto out = open_out(dir / "violations.csv");
    csv::write_row(out, {"id", "report_date", "last_inspection_date", "address", "status", "open_and_vacant",
                         "overgrowth", "active_utilities"});
    for (std::size_t i = 0; i < opt.violations; ++i) {
      const Date rep = first + std::chrono::days{static_cast<long long>(rng.below(span_days))};
      std::string inspected;
      if (!rng.chance(0.2)) inspected = format_date(rep + std::chrono::days{static_cast<long long>(rng.below(120))});
      char id[24];
      std::snprintf(id, sizeof id, "CV%07zu", i + 1);
      const std::string status = statuses[rng.weighted(status_w)];
      const std::string addr = address(rng);
      const std::string vacant = flag();
      const std::string growth = flag();
      const std::string utils = flag();
      csv::write_row(out, {id, format_date(rep), inspected, addr, status, vacant, growth, utils});
    }
    summary.violations = opt.violations;
  }

  // Community assets.
  {
    const char* kinds[] = {"school", "religious", "park", "transit_stop"};
    const std::vector<double> kind_w{3.0, 4.0, 2.0, 6.0};
    const char* denominations[] = {"Baptist", "AME", "Methodist", "Catholic", "Non-denominational"};
    auto out = open_out(dir / "assets.csv");
    csv::write_row(out, {"id", "kind", "name", "lat", "lon", "address", "grades", "denomination", "acres", "routes"});
    for (std::size_t i = 0; i < opt.assets; ++i) {
      const std::string kind = kinds[rng.weighted(kind_w)];
      const GeoPoint p = point_in(rng, fixture_city_bounds());
      const std::string addr = address(rng);
      std::string name, grades, denom, acres, routes;
      if (kind == "school") {
        name = "Westside Academy " + std::to_string(i + 1);
        grades = rng.chance(0.5) ? "K-5" : "6-8";
      } else if (kind == "religious") {
        name = "Community Church " + std::to_string(i + 1);
        denom = denominations[rng.below(std::size(denominations))];
      } else if (kind == "park") {
        name = "Neighborhood Park " + std::to_string(i + 1);
        acres = fmt_num(rng.uniform(0.5, 40.0), 1);
      } else {
        name = "MARTA Stop " + std::to_string(i + 1);
        const auto first_route = 1 + rng.below(120);
        const auto second_route = 1 + rng.below(120);
        routes = std::to_string(first_route) + ";" + std::to_string(second_route);
      }
      char id[24];
      std::snprintf(id, sizeof id, "A%04zu", i + 1);
      csv::write_row(out, {id, kind, name, fmt_coord(p.lat), fmt_coord(p.lon), addr, grades, denom, acres, routes});
    }
    summary.assets = opt.assets;
  }

  // Census profiles; factors are driven by each neighborhood's violent share
  // so correlations have structure.
  {
    const std::vector<std::string> factors{"population.pct_senior",   "population.pct_under_18",
                                           "commute.pct_transit",     "commute.mean_travel_minutes",
                                           "housing.pct_vacant",      "economic.median_income",
                                           "education.pct_bachelors"};
    auto out = open_out(dir / "census.csv");
    std::vector<std::string> header{"region_id", "region_kind", "population"};
    header.insert(header.end(), factors.begin(), factors.end());
    csv::write_row(out, header);

    std::vector<std::vector<double>> values;
    for (const auto& h : hoods) {
      const double v = h.violent_share;
      values.push_back({
          std::clamp(22.0 - 30.0 * v + rng.uniform(-3.0, 3.0), 2.0, 40.0),
          std::clamp(15.0 + 25.0 * v + rng.uniform(-4.0, 4.0), 5.0, 45.0),
          std::clamp(4.0 + 60.0 * v + rng.uniform(-5.0, 5.0), 0.5, 60.0),
          std::clamp(24.0 + 20.0 * v + rng.uniform(-4.0, 4.0), 10.0, 60.0),
          std::clamp(3.0 + 45.0 * v + rng.uniform(-4.0, 4.0), 0.5, 50.0),
          std::clamp(78000.0 - 110000.0 * v + rng.uniform(-8000.0, 8000.0), 15000.0, 150000.0),
          std::clamp(55.0 - 90.0 * v + rng.uniform(-6.0, 6.0), 3.0, 80.0),
      });
    }
    for (const auto& n : npus) {
      std::vector<double> avg(factors.size(), 0.0);
      long long pop = 0;
      int members = 0;
      for (std::size_t i = 0; i < hoods.size(); ++i) {
        if (hoods[i].npu != n.id) continue;
        pop += hoods[i].population;
        ++members;
        for (std::size_t k = 0; k < factors.size(); ++k) avg[k] += values[i][k];
      }
      std::vector<std::string> row{n.id, "npu", std::to_string(pop)};
      for (double a : avg) row.push_back(fmt_num(a / members, 2));
      csv::write_row(out, row);
    }
    for (std::size_t i = 0; i < hoods.size(); ++i) {
      std::vector<std::string> row{hoods[i].id, "neighborhood", std::to_string(hoods[i].population)};
      for (std::size_t k = 0; k < factors.size(); ++k) {
        // One gap so pairwise deletion has something to drop.
        row.push_back(i == 3 && k == 4 ? std::string{} : fmt_num(values[i][k], 2));
      }
      csv::write_row(out, row);
    }
  }

  return summary;
}

}  // namespace safetydash
