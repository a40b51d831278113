#include "doctest.h"

#include "../support/world.hpp"

#include "safetydash/error.hpp"
#include "safetydash/geojson.hpp"

#include <fstream>
#include <sstream>

using namespace safetydash;
using namespace testworld;

namespace {

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string without_built_at(std::string text)
{
  const auto pos = text.find("\"built_at\"");
  const auto end = text.find('\n', pos);
  return text.erase(pos, end - pos);
}

}  // namespace

TEST_CASE("empty inputs give a valid snapshot with an all-zero report")
{
  const auto snap = build_snapshot(SnapshotInputs{});
  CHECK(snap.crimes().empty());
  CHECK(snap.report() == IngestReport{});
  CHECK_FALSE(snap.extent());
  CHECK(snap.region_ids(RegionKind::npu).empty());
  const auto back = parse_snapshot(serialize_snapshot(snap));
  CHECK(back.same_content(snap));
}

TEST_CASE("build_snapshot joins, tallies, and reconciles")
{
  SnapshotInputs in;
  in.regions = testgeo::small_world();
  in.crimes = {crime("c1", make_date(2014, 1, 1), {1.5, 1.5}, "04"), crime("c2", make_date(2014, 1, 2), {9, 9}, "05"),
               crime("c3", make_date(2014, 1, 3), {0.5, 0.5}, "13")};
  in.crimes[2].location.reset();
  in.violations = {violation("v1", make_date(2014, 1, 1), {0.5, 1.5}, "Open")};
  in.partial.crimes.row_errors = 4;
  in.partial.crimes.geocoded = 0;
  const auto snap = build_snapshot(in, "2014-01-01T00:00:00Z");
  const auto& r = snap.report().crimes;
  CHECK(r.parsed == 3);
  CHECK(r.row_errors == 4);
  CHECK(r.located == 2);
  CHECK(r.geocode_failed == 1);
  CHECK(r.unjoined == 1);
  CHECK(r.reconciles());
  CHECK(snap.crimes()[0].npu == "NPU-K");
  CHECK(snap.crimes()[0].neighborhood == "k-hood");
  CHECK(snap.violations()[0].npu == "NPU-T");
  CHECK(snap.built_at() == "2014-01-01T00:00:00Z");
  CHECK(snap.npu_of_neighborhood("l-hood") == "NPU-L");
  CHECK(snap.population(RegionKind::npu, "NPU-K") == 1000);
}

TEST_CASE("census rows must reference known regions")
{
  SnapshotInputs in;
  in.regions = testgeo::small_world();
  in.census.profiles.push_back(CensusProfile{"k-hood", RegionKind::neighborhood, 10, {}});
  CHECK_NOTHROW(build_snapshot(in));
  in.census.profiles.push_back(CensusProfile{"atlantis", RegionKind::neighborhood, 10, {}});
  CHECK_THROWS_AS(build_snapshot(in), ReferentialError);
  in.census.profiles.back() = CensusProfile{"k-hood", RegionKind::npu, 10, {}};
  CHECK_THROWS_AS(build_snapshot(in), ReferentialError);
}

TEST_CASE("census population overrides the boundary file")
{
  SnapshotInputs in;
  in.regions = testgeo::small_world(0);
  in.census.profiles.push_back(CensusProfile{"NPU-K", RegionKind::npu, 2500, {}});
  const auto snap = build_snapshot(in);
  CHECK(snap.population(RegionKind::npu, "NPU-K") == 2500);
  CHECK_FALSE(snap.population(RegionKind::npu, "NPU-A"));
}

TEST_CASE("save/load round-trip on the generated fixture")
{
  const auto& fx = fixture();
  TempDir dir;
  const auto path = dir.file("snap.json");
  save_snapshot(*fx.snapshot, path);
  const auto back = load_snapshot(path);
  CHECK(back.same_content(*fx.snapshot));
  CHECK(back.built_at() == fx.snapshot->built_at());
  CHECK(back.identity() != fx.snapshot->identity());
  CHECK(back.crimes() == fx.snapshot->crimes());
  CHECK(back.violations() == fx.snapshot->violations());
  CHECK(back.assets() == fx.snapshot->assets());
  CHECK(back.census() == fx.snapshot->census());
  CHECK(back.regions() == fx.snapshot->regions());
  CHECK(back.report() == fx.snapshot->report());
  CHECK(serialize_snapshot(back) == read_file(path));
}

TEST_CASE("identical inputs give byte-identical snapshots apart from built_at")
{
  TempDir a, b;
  generate_fixture(FixtureOptions{2000, 300, 20, 9}, a.path().string());
  generate_fixture(FixtureOptions{2000, 300, 20, 9}, b.path().string());
  for (const char* f : {"crimes.csv", "violations.csv", "assets.csv", "census.csv", "regions.geojson"}) {
    CHECK(read_file(a.file(f)) == read_file(b.file(f)));
  }
  StubGeocoder g1(fixture_city_bounds()), g2(fixture_city_bounds());
  const auto s1 = ingest_files(sources_in(a.path().string()), UcrTable::defaults(), g1, "2001-01-01T00:00:00Z");
  const auto s2 = ingest_files(sources_in(b.path().string()), UcrTable::defaults(), g2, "2002-02-02T00:00:00Z");
  const auto t1 = serialize_snapshot(s1.snapshot), t2 = serialize_snapshot(s2.snapshot);
  CHECK(t1 != t2);
  CHECK(without_built_at(t1) == without_built_at(t2));
}

TEST_CASE("floats persist with 9 significant digits")
{
  CHECK(canonical(33.123456789123) == 33.1234568);
  CHECK(canonical(-84.0000000004) == -84.0);
  SnapshotInputs in;
  in.regions = testgeo::small_world();
  in.crimes = {crime("c", make_date(2014, 1, 1), {1.23456789123, 1.5}, "04")};
  const auto snap = build_snapshot(in);
  CHECK(snap.crimes()[0].location->lat == 1.23456789);
  const auto text = serialize_snapshot(snap);
  CHECK(text.find("1.23456789") != std::string::npos);
  CHECK(text.find("1.234567891") == std::string::npos);
}

TEST_CASE("corrupt or wrong-version snapshot files are rejected")
{
  TempDir dir;
  CHECK_THROWS_AS(load_snapshot(dir.file("missing.json")), FormatError);
  CHECK_THROWS_AS(parse_snapshot("{\"format_version\": 1, \"crimes\": [tru"), FormatError);
  CHECK_THROWS_AS(parse_snapshot("[]"), FormatError);
  auto doc = snapshot_to_json(build_snapshot(SnapshotInputs{}));
  doc["format_version"] = 2;
  CHECK_THROWS_AS(parse_snapshot(doc.dump()), FormatError);
  doc["format_version"] = 1;
  CHECK_NOTHROW(parse_snapshot(doc.dump()));
  doc.erase("crimes");
  CHECK_THROWS_AS(parse_snapshot(doc.dump()), FormatError);
}

TEST_CASE("ingest_files surfaces schema errors with the column name")
{
  TempDir dir;
  generate_fixture(FixtureOptions{50, 10, 5, 2}, dir.path().string());
  {
    std::ofstream bad(dir.file("crimes.csv"), std::ios::trunc);
    bad << "id,report_date,occurrence_date,address\nC1,2014-01-01,2014-01-01,1 Elm St\n";
  }
  NoopGeocoder noop;
  try {
    ingest_files(sources_in(dir.path().string()), UcrTable::defaults(), noop);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.column() == "ucr_code");
  }
}

TEST_CASE("no-op geocoder leaves coordinate-less rows failed, and the report still reconciles")
{
  TempDir dir;
  const auto summary = generate_fixture(FixtureOptions{3000, 200, 10, 4}, dir.path().string());
  NoopGeocoder noop;
  const auto out = ingest_files(sources_in(dir.path().string()), UcrTable::defaults(), noop);
  const auto& r = out.snapshot.report();
  CHECK(r.crimes.geocoded == 0);
  CHECK(r.crimes.geocode_failed == summary.crimes_without_coordinates);
  CHECK(r.violations.geocode_failed == 200);
  CHECK(r.crimes.reconciles());
  CHECK(r.violations.reconciles());
}
