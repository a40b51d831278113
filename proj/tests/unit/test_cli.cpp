#include "doctest.h"

#include "../support/process.hpp"
#include "../support/world.hpp"

#include "httplib.h"

#include "safetydash/api.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

using namespace safetydash;
using namespace testworld;
using testproc::run;
using testproc::slurp;

namespace {

const std::string kCli = SAFETYDASH_CLI;
const char* kSourceFiles[] = {"crimes.csv", "violations.csv", "assets.csv", "census.csv", "regions.geojson"};

std::vector<std::string> source_args(const TempDir& d)
{
  return {"--crimes",  d.file("crimes.csv"), "--violations", d.file("violations.csv"), "--assets", d.file("assets.csv"),
          "--census",  d.file("census.csv"), "--regions",    d.file("regions.geojson")};
}

testproc::Result cli(const TempDir& scratch, std::vector<std::string> args) { return run(kCli, std::move(args), scratch.path().string()); }

std::vector<std::string> ingest_args(const TempDir& d, const std::string& out, std::vector<std::string> extra = {})
{
  std::vector<std::string> a{"ingest"};
  for (auto& s : source_args(d)) a.push_back(s);
  a.insert(a.end(), {"--geocoder", "stub", "--out", out});
  for (auto& s : extra) a.push_back(s);
  return a;
}

// "crimes: parsed=1 row_errors=0 ..." -> {"parsed": 1, ...}
std::map<std::string, long long> report_line(const std::string& out, const std::string& dataset)
{
  std::map<std::string, long long> fields;
  std::istringstream lines(out);
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind(dataset + ": ", 0) != 0) continue;
    static const std::regex kv(R"((\w+)=(\d+))");
    for (std::sregex_iterator it(line.begin(), line.end(), kv), end; it != end; ++it) fields[(*it)[1]] = std::stoll((*it)[2]);
  }
  return fields;
}

std::string without_built_at(std::string text)
{
  const auto pos = text.find("\"built_at\"");
  if (pos == std::string::npos) return text;
  return text.erase(pos, text.find('\n', pos) - pos);
}

struct Ingested {
  TempDir dir;
  std::string snapshot;
};

// One small generated and ingested set shared by the export and serve tests.
const Ingested& small_set()
{
  static Ingested* s = [] {
    auto* i = new Ingested;
    auto r = cli(i->dir, {"genfixture", "--crimes", "3000", "--violations", "400", "--seed", "11", "--out", i->dir.path().string()});
    if (r.exit_code != 0) throw std::runtime_error("genfixture failed: " + r.err);
    i->snapshot = i->dir.file("snap.json");
    r = cli(i->dir, ingest_args(i->dir, i->snapshot, {"--built-at", "2000-01-01T00:00:00Z"}));
    if (r.exit_code != 0) throw std::runtime_error("ingest failed: " + r.err);
    return i;
  }();
  return *s;
}

}  // namespace

TEST_CASE("cli: genfixture is deterministic per seed and ingests cleanly")
{
  TempDir a, b, c;
  REQUIRE(cli(a, {"genfixture", "--crimes", "10000", "--seed", "5", "--out", a.path().string()}).exit_code == 0);
  REQUIRE(cli(b, {"genfixture", "--crimes", "10000", "--seed", "5", "--out", b.path().string()}).exit_code == 0);
  REQUIRE(cli(c, {"genfixture", "--crimes", "10000", "--seed", "6", "--out", c.path().string()}).exit_code == 0);
  for (const char* f : kSourceFiles) CHECK(slurp(a.file(f)) == slurp(b.file(f)));
  CHECK(slurp(a.file("crimes.csv")) != slurp(c.file("crimes.csv")));

  std::istringstream rows(slurp(a.file("crimes.csv")));
  std::string header, line;
  std::getline(rows, header);
  int n = 0;
  while (std::getline(rows, line)) n += !line.empty();
  CHECK(n == 10000);

  const auto v = cli(a, {"validate", "--crimes", a.file("crimes.csv"), "--violations", a.file("violations.csv"), "--strict"});
  CHECK(v.exit_code == 0);
  CHECK(v.out.find("0 row errors") != std::string::npos);
}

TEST_CASE("cli: ingest reports reconciling totals and writes a loadable snapshot")
{
  TempDir d;
  REQUIRE(cli(d, {"genfixture", "--crimes", "10000", "--seed", "3", "--out", d.path().string()}).exit_code == 0);
  const auto snap = d.file("snap.json");
  const auto r = cli(d, ingest_args(d, snap));
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);
  for (const char* ds : {"crimes", "violations", "assets", "census"}) {
    const auto f = report_line(r.out, ds);
    INFO(ds << "\n" << r.out);
    REQUIRE(f.count("parsed"));
    CHECK(f.at("row_errors") == 0);
    CHECK(f.at("parsed") == f.at("located") + f.at("geocode_failed"));
    CHECK(f.at("geocoded") <= f.at("located"));
    CHECK(f.at("unjoined") <= f.at("located"));
  }
  const auto crimes = report_line(r.out, "crimes");
  CHECK(crimes.at("parsed") == 10000);
  CHECK(crimes.at("geocoded") >= 90);
  CHECK(crimes.at("geocoded") <= 130);
  CHECK(crimes.at("geocode_failed") == 0);
  CHECK(r.out.find("snapshot: " + snap) != std::string::npos);
  const auto loaded = load_snapshot(snap);
  CHECK(loaded.report().crimes.parsed == 10000);
  CHECK(loaded.report().crimes.geocoded == crimes.at("geocoded"));
}

TEST_CASE("cli: missing ucr_code column exits 2 naming the column")
{
  TempDir d;
  REQUIRE(cli(d, {"genfixture", "--crimes", "50", "--violations", "5", "--out", d.path().string()}).exit_code == 0);
  {
    std::ofstream bad(d.file("crimes.csv"), std::ios::trunc);
    bad << "id,report_date,occurrence_date,address\nC1,2014-01-01,2014-01-01,1 Elm St\n";
  }
  const auto r = cli(d, ingest_args(d, d.file("snap.json")));
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("ucr_code") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(d.file("snap.json")));

  const auto missing = cli(d, {"ingest", "--crimes", d.file("nope.csv"), "--violations", d.file("violations.csv"), "--assets",
                               d.file("assets.csv"), "--census", d.file("census.csv"), "--regions", d.file("regions.geojson"),
                               "--out", d.file("x.json")});
  CHECK(missing.exit_code == 2);
}

TEST_CASE("cli: rerun with the same inputs and cache gives a byte-identical snapshot")
{
  TempDir d;
  REQUIRE(cli(d, {"genfixture", "--crimes", "2000", "--violations", "300", "--seed", "8", "--out", d.path().string()}).exit_code == 0);
  const auto cache = d.file("geocache.csv");
  REQUIRE(cli(d, ingest_args(d, d.file("a.json"), {"--geocode-cache", cache})).exit_code == 0);
  CHECK(std::filesystem::exists(cache));
  REQUIRE(cli(d, ingest_args(d, d.file("b.json"), {"--geocode-cache", cache})).exit_code == 0);
  CHECK(without_built_at(slurp(d.file("a.json"))) == without_built_at(slurp(d.file("b.json"))));

  REQUIRE(cli(d, ingest_args(d, d.file("c.json"), {"--geocode-cache", cache, "--built-at", "2001-01-01T00:00:00Z"})).exit_code == 0);
  REQUIRE(cli(d, ingest_args(d, d.file("e.json"), {"--geocode-cache", cache, "--built-at", "2001-01-01T00:00:00Z"})).exit_code == 0);
  CHECK(slurp(d.file("c.json")) == slurp(d.file("e.json")));
}

TEST_CASE("cli: export json equals the API body")
{
  const auto& s = small_set();
  const Api api(std::make_shared<const DataSnapshot>(load_snapshot(s.snapshot)));
  struct Case {
    std::string what;
    std::vector<std::string> args;
    std::string path;
    Params params;
  };
  const std::vector<Case> cases{
      {"hexes", {}, "/api/map/hexes", {}},
      {"hexes", {"--span", "2014", "--categories", "theft"}, "/api/map/hexes", {{"span", "2014"}, {"categories", "theft"}}},
      {"hexes", {"--hex-size", "250"}, "/api/map/hexes", {{"hex_size", "250"}}},
      {"timeseries", {"--scope", "westside", "--granularity", "week"}, "/api/aggregate/timeseries", {{"scope", "westside"}, {"granularity", "week"}}},
      {"npus", {"--per-capita", "true"}, "/api/aggregate/npus", {{"per_capita", "true"}}},
      {"type-share", {"--dataset", "violations"}, "/api/aggregate/type-share", {{"dataset", "violations"}}},
      {"correlations", {"--measure", "total_per_1000"}, "/api/correlations", {{"measure", "total_per_1000"}}},
  };
  for (const auto& c : cases) {
    std::vector<std::string> args{"export", "--snapshot", s.snapshot, "--what", c.what, "--format", "json"};
    args.insert(args.end(), c.args.begin(), c.args.end());
    const auto r = cli(s.dir, args);
    INFO(c.what << " " << r.err);
    REQUIRE(r.exit_code == 0);
    const auto expect = api.get(c.path, c.params);
    REQUIRE(expect.status == 200);
    CHECK(Json::parse(r.out) == Json::parse(expect.body));
    CHECK(r.out == expect.body + "\n");
  }

  const auto file = s.dir.file("hexes.json");
  REQUIRE(cli(s.dir, {"export", "--snapshot", s.snapshot, "--what", "hexes", "--out", file}).exit_code == 0);
  CHECK(slurp(file) == api.get("/api/map/hexes", {}).body);
}

TEST_CASE("cli: export csv shapes")
{
  const auto& s = small_set();
  const auto snap = load_snapshot(s.snapshot);
  auto lines_of = [](const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
  };

  auto npus = cli(s.dir, {"export", "--snapshot", s.snapshot, "--what", "npus", "--format", "csv"});
  REQUIRE(npus.exit_code == 0);
  auto lines = lines_of(npus.out);
  REQUIRE_FALSE(lines.empty());
  CHECK(lines[0] == "npu,value,westside");
  CHECK(lines.size() == 1 + snap.region_ids(RegionKind::npu).size());
  const auto counts = counts_by_npu(snap, DatasetSelector::crimes, {}, false);
  for (std::size_t i = 0; i < counts.entries.size(); ++i) {
    const auto& e = counts.entries[i];
    CHECK(lines[i + 1] == e.npu + "," + std::to_string(e.count) + "," + (e.westside ? "true" : "false"));
  }

  auto hexes = cli(s.dir, {"export", "--snapshot", s.snapshot, "--what", "hexes", "--format", "csv"});
  REQUIRE(hexes.exit_code == 0);
  lines = lines_of(hexes.out);
  CHECK(lines[0] == "q,r,count,color_class,lat,lon");
  CHECK(lines.size() == 1 + build_hexmap(snap, CrimeFilter{}, default_grid(snap)).size());

  const std::map<std::string, std::string> headers{{"timeseries", "series,bucket,count"},
                                                   {"type-share", "series,type,percent"},
                                                   {"correlations", "factor,measure,scope,r,n,excluded"}};
  for (const auto& [what, header] : headers) {
    auto r = cli(s.dir, {"export", "--snapshot", s.snapshot, "--what", what, "--format", "csv"});
    REQUIRE(r.exit_code == 0);
    CHECK(lines_of(r.out).at(0) == header);
  }
}

TEST_CASE("cli: bad export requests exit 2")
{
  const auto& s = small_set();
  CHECK(cli(s.dir, {"export", "--snapshot", s.snapshot, "--what", "weather"}).exit_code == 2);
  CHECK(cli(s.dir, {"export", "--snapshot", s.snapshot, "--what", "timeseries", "--granularity", "fortnight"}).exit_code == 2);
  CHECK(cli(s.dir, {"export", "--snapshot", s.snapshot, "--what", "hexes", "--format", "xml"}).exit_code == 2);
  CHECK(cli(s.dir, {"export", "--snapshot", s.dir.file("missing.json"), "--what", "npus"}).exit_code == 2);
  CHECK(cli(s.dir, {}).exit_code == 2);
  CHECK(cli(s.dir, {"frobnicate"}).exit_code == 2);
  CHECK(cli(s.dir, {"--help"}).exit_code == 0);
}

TEST_CASE("cli: serve binds an ephemeral port, answers, logs, and stops on SIGTERM")
{
  const auto& s = small_set();
  testproc::Child child(kCli, {"serve", "--snapshot", s.snapshot, "--addr", "127.0.0.1:0"}, s.dir.path().string());
  const auto first = child.read_line(std::chrono::seconds(10));
  std::smatch m;
  REQUIRE_MESSAGE(std::regex_search(first, m, std::regex(R"(listening on http://127\.0\.0\.1:(\d+))")), first);
  const int port = std::stoi(m[1]);
  CHECK(port > 0);

  httplib::Client client("127.0.0.1", port);
  auto meta = client.Get("/api/meta");
  REQUIRE(meta);
  CHECK(meta->status == 200);
  CHECK(Json::parse(meta->body)["counts"]["crimes"] == 3000);
  auto missing = client.Get("/api/nope");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  const auto log = child.wait_stderr("GET /api/nope 404", std::chrono::seconds(5));
  CHECK(log.find("GET /api/meta 200") != std::string::npos);
  CHECK(log.find("GET /api/nope 404") != std::string::npos);
  CHECK(std::count(log.begin(), log.end(), '\n') == 2);

  child.signal(SIGTERM);
  CHECK(child.wait(std::chrono::seconds(10)) == 0);
  CHECK(child.read_line(std::chrono::seconds(1)) == "stopped");
}

TEST_CASE("cli: serve rejects a corrupt snapshot and a busy port")
{
  const auto& s = small_set();
  const auto corrupt = s.dir.file("corrupt.json");
  {
    std::ofstream out(corrupt);
    out << "{\"format_version\": 1, \"crimes\": [";
  }
  CHECK(cli(s.dir, {"serve", "--snapshot", corrupt, "--addr", "127.0.0.1:0"}).exit_code == 2);
  CHECK(cli(s.dir, {"serve", "--snapshot", s.snapshot, "--addr", "nonsense"}).exit_code == 2);

  httplib::Server blocker;
  const int port = blocker.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  testproc::Child busy(kCli, {"serve", "--snapshot", s.snapshot, "--addr", "127.0.0.1:" + std::to_string(port)},
                       s.dir.path().string());
  CHECK(busy.wait(std::chrono::seconds(10)) == 2);
}

TEST_CASE("cli: validate reports row errors and fails when strict")
{
  TempDir d;
  {
    std::ofstream out(d.file("crimes.csv"));
    out << "id,report_date,occurrence_date,ucr_code,address,latitude,longitude\n"
        << "C1,2014-01-01,2014-01-01,04,1 Elm St,33.75,-84.4\n"
        << "C2,not-a-date,2014-01-01,04,2 Elm St,33.75,-84.4\n";
  }
  const auto lax = cli(d, {"validate", "--crimes", d.file("crimes.csv")});
  CHECK(lax.exit_code == 0);
  CHECK(lax.out.find("1 row errors") != std::string::npos);
  CHECK(cli(d, {"validate", "--crimes", d.file("crimes.csv"), "--strict"}).exit_code == 2);
  CHECK(cli(d, {"validate", "--crimes", d.file("absent.csv")}).exit_code == 2);
}
