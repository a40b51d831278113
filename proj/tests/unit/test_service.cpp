#include "doctest.h"

#include "../support/facade.hpp"
#include "../support/service.hpp"
#include "../support/world.hpp"

#include "safetydash/error.hpp"

#include <sstream>

using namespace safetydash;
using namespace testworld;
using namespace testservice;

TEST_CASE("HTTP payloads decode to the library results across a parameter matrix")
{
  const auto& fx = fixture();
  Api api(fx.snapshot);
  RunningServer server(api);
  auto client = server.client();
  const auto matrix = parameter_matrix(*fx.snapshot);
  CHECK(matrix.size() > 100);
  for (const auto& c : matrix) {
    const auto r = fetch(client, c.path, c.params);
    INFO(c.path << query_string(c.params) << " -> " << r.body.substr(0, 200));
    REQUIRE(r.status == 200);
    CHECK(equals_library(*fx.snapshot, c, r.json));
    CHECK(schema_errors(r.json, schema_for(c.path)).empty());
    CHECK(r.body == api.get(c.path, c.params).body);
  }
}

TEST_CASE("hexes with no parameters equal the all-crime, all-time hexmap")
{
  const auto& fx = fixture();
  Api api(fx.snapshot);
  RunningServer server(api);
  auto client = server.client();
  const auto r = fetch(client, "/api/map/hexes");
  REQUIRE(r.status == 200);
  CHECK(r.content_type.find("application/geo+json") == 0);
  const auto cells = decode_hexes(r.json);
  CHECK(cells == build_hexmap(*fx.snapshot, CrimeFilter{}, default_grid(*fx.snapshot)));
  long long sum = 0;
  for (const auto& h : cells) sum += h.count;
  CHECK(sum == fx.snapshot->report().crimes.located);
  for (const auto& f : r.json["features"]) {
    const auto& ring = f["geometry"]["coordinates"][0];
    CHECK(ring.size() == 7);
    CHECK(ring.front() == ring.back());
  }
}

TEST_CASE("meta and regions pass through the snapshot")
{
  const auto& fx = fixture();
  Api api(fx.snapshot);
  RunningServer server(api);
  auto client = server.client();
  const auto meta = fetch(client, "/api/meta");
  CHECK(meta.json["counts"]["crimes"] == fx.snapshot->report().crimes.parsed);
  CHECK(meta.json["factors"].get<std::vector<std::string>>() == fx.snapshot->census_factors());
  const auto npus = fetch(client, "/api/regions", {{"kind", "npu"}});
  CHECK(npus.json["features"].size() == fx.snapshot->region_ids(RegionKind::npu).size());

  Api empty(std::make_shared<const DataSnapshot>(build_snapshot(SnapshotInputs{})));
  const auto m = Json::parse(empty.get("/api/meta", {}).body);
  CHECK(m["counts"]["crimes"] == 0);
  CHECK(m["npus"].empty());
  CHECK(m["neighborhoods"].empty());
}

TEST_CASE("error statuses and codes")
{
  const auto& fx = fixture();
  Api api(fx.snapshot);
  RunningServer server(api);
  auto client = server.client();
  struct Expect {
    std::string path;
    Params params;
    int status;
    std::string code;
  };
  const std::vector<Expect> cases{
      {"/api/aggregate/timeseries", {{"granularity", "fortnight"}}, 400, "bad_granularity"},
      {"/api/aggregate/timeseries", {{"scope", "npu:U"}}, 404, "unknown_npu"},
      {"/api/aggregate/type-share", {{"scope", "npu:U"}}, 404, "unknown_npu"},
      {"/api/aggregate/timeseries", {{"scope", "county"}}, 400, "bad_scope"},
      {"/api/aggregate/timeseries", {{"from", "2014-02-30"}}, 400, "bad_date"},
      {"/api/aggregate/npus", {{"dataset", "parking"}}, 400, "bad_dataset"},
      {"/api/aggregate/npus", {{"per_capita", "maybe"}}, 400, "bad_param"},
      {"/api/correlations", {{"measure", "happiness"}}, 400, "bad_measure"},
      {"/api/correlations", {{"factors", "no.such.factor"}}, 400, "bad_param"},
      {"/api/map/hexes", {{"span", "2014-13"}}, 400, "bad_span"},
      {"/api/map/hexes", {{"categories", "theft"}, {"ucr", "05"}}, 400, "bad_filter"},
      {"/api/map/hexes", {{"categories", "arson"}}, 400, "bad_category"},
      {"/api/map/hexes", {{"hex_size", "-5"}}, 400, "bad_param"},
      {"/api/map/violations", {{"zoom", "23"}}, 400, "bad_zoom"},
      {"/api/map/violations", {{"zoom", "x"}}, 400, "bad_zoom"},
      {"/api/map/assets", {{"kinds", "castle"}}, 400, "bad_kind"},
      {"/api/regions", {{"kind", "county"}}, 400, "bad_kind"},
      {"/api/nothing", {}, 404, "not_found"},
  };
  for (const auto& e : cases) {
    const auto r = fetch(client, e.path, e.params);
    INFO(e.path << query_string(e.params) << " -> " << r.body);
    CHECK(r.status == e.status);
    CHECK(r.json["error"]["code"] == e.code);
    CHECK(r.json["error"]["status"] == e.status);
    CHECK(schema_errors(r.json, "error").empty());
  }
}

TEST_CASE("insufficient westside neighborhoods map to 422")
{
  SnapshotInputs in;
  in.regions = testgeo::small_world();
  in.crimes = {crime("c1", make_date(2014, 1, 1), {0.5, 0.5}, "04"), crime("c2", make_date(2014, 1, 1), {1.5, 0.5}, "05")};
  in.census.factor_names = {"f"};
  for (const char* hood : {"a-hood", "l-hood"}) in.census.profiles.push_back(CensusProfile{hood, RegionKind::neighborhood, 100, {{"f", 1.0}}});
  Api api(std::make_shared<const DataSnapshot>(build_snapshot(in)));
  RunningServer server(api);
  auto client = server.client();
  const auto r = fetch(client, "/api/correlations", {{"measure", "violent_pct"}, {"scope", "westside"}});
  CHECK(r.status == 422);
  CHECK(r.json["error"]["code"] == "insufficient_neighborhoods");
}

TEST_CASE("an npu scope absent from the regions is 404")
{
  SnapshotInputs in;
  in.regions = testgeo::small_world();
  Api api(std::make_shared<const DataSnapshot>(build_snapshot(in)));
  const auto r = api.get("/api/aggregate/timeseries", {{"scope", "npu:Z"}});
  CHECK(r.status == 404);
  CHECK(Json::parse(r.body)["error"]["code"] == "unknown_npu");
  CHECK(api.get("/api/aggregate/timeseries", {{"scope", "npu:K"}}).status == 200);
}

TEST_CASE("no snapshot gives 503")
{
  Api api(nullptr);
  RunningServer server(api);
  auto client = server.client();
  for (const char* path : {"/api/meta", "/api/map/hexes", "/api/nothing"}) {
    const auto r = fetch(client, path);
    CHECK(r.status == 503);
    CHECK(r.json["error"]["code"] == "no_snapshot");
  }
}

TEST_CASE("CORS headers follow the configured origins")
{
  const auto& fx = fixture();
  ApiOptions opts;
  opts.cors_origins = {"http://ui.example"};
  Api api(fx.snapshot, opts);
  RunningServer server(api);
  auto client = server.client();
  auto ok = client.Get("/api/meta", {{"Origin", "http://ui.example"}});
  REQUIRE(ok);
  CHECK(ok->get_header_value("Access-Control-Allow-Origin") == "http://ui.example");
  auto denied = client.Get("/api/meta", {{"Origin", "http://evil.example"}});
  REQUIRE(denied);
  CHECK_FALSE(denied->has_header("Access-Control-Allow-Origin"));
  auto pre = client.Options("/api/meta", {{"Origin", "http://ui.example"}});
  REQUIRE(pre);
  CHECK(pre->status == 204);
  CHECK(pre->get_header_value("Access-Control-Allow-Methods").find("GET") != std::string::npos);

  ApiOptions any;
  any.cors_origins = {"*"};
  Api open(fx.snapshot, any);
  CHECK(open.allowed_origin("http://whatever") == "*");
  Api closed(fx.snapshot);
  CHECK(closed.allowed_origin("http://ui.example").empty());
}

TEST_CASE("reload is off by default and swaps snapshots when enabled")
{
  const auto& fx = fixture();
  TempDir dir;
  const auto path = dir.file("snap.json");
  save_snapshot(*fx.snapshot, path);
  {
    ApiOptions opts;
    opts.snapshot_path = path;
    Api api(fx.snapshot, opts);
    RunningServer server(api);
    auto client = server.client();
    auto r = client.Post("/admin/reload");
    REQUIRE(r);
    CHECK(r->status == 404);
  }
  ApiOptions opts;
  opts.snapshot_path = path;
  opts.enable_reload = true;
  Api api(std::make_shared<const DataSnapshot>(build_snapshot(SnapshotInputs{})), opts);
  RunningServer server(api);
  auto client = server.client();
  CHECK(fetch(client, "/api/meta").json["counts"]["crimes"] == 0);
  auto r = client.Post("/admin/reload");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(fetch(client, "/api/meta").json["counts"]["crimes"] == fx.snapshot->crimes().size());

  {
    std::ofstream bad(path, std::ios::trunc);
    bad << "{broken";
  }
  auto failed = client.Post("/admin/reload");
  REQUIRE(failed);
  CHECK(failed->status == 500);
  CHECK(fetch(client, "/api/meta").json["counts"]["crimes"] == fx.snapshot->crimes().size());
}

TEST_CASE("repeated requests return identical bodies; one log line per request")
{
  const auto& fx = fixture();
  Api api(fx.snapshot);
  std::ostringstream log;
  {
    RunningServer server(api, &log);
    auto client = server.client();
    for (const char* path : {"/api/map/hexes", "/api/aggregate/npus", "/api/correlations"}) {
      const auto a = fetch(client, path), b = fetch(client, path);
      CHECK(a.body == b.body);
    }
    fetch(client, "/api/nothing");
  }
  std::istringstream lines(log.str());
  int n = 0;
  for (std::string line; std::getline(lines, line);) {
    ++n;
    CHECK(line.find("GET /api/") != std::string::npos);
  }
  CHECK(n == 7);
  CHECK(log.str().find("GET /api/nothing 404") != std::string::npos);
}

TEST_CASE("concurrent readers see consistent bodies")
{
  const auto& fx = fixture();
  Api api(fx.snapshot);
  RunningServer server(api);
  const auto expect = api.get("/api/map/hexes", {{"span", "2013"}}).body;
  std::atomic<int> bad{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 6; ++t) {
    threads.emplace_back([&] {
      auto c = server.client();
      for (int i = 0; i < 5; ++i) {
        auto r = c.Get("/api/map/hexes?span=2013");
        if (!r || r->status != 200 || r->body != expect) ++bad;
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(bad.load() == 0);
}
