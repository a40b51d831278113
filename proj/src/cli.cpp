#include "safetydash/cli.hpp"

#include "safetydash/api.hpp"
#include "safetydash/csv.hpp"
#include "safetydash/error.hpp"
#include "safetydash/fixture.hpp"
#include "safetydash/geojson.hpp"
#include "safetydash/ingest.hpp"
#include "safetydash/pipeline.hpp"
#include "safetydash/server.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <charconv>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

namespace safetydash {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitData = 2;
constexpr const char* kDefaultAddr = "127.0.0.1:8080";
constexpr std::size_t kMaxPrintedRowErrors = 20;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HostPort {
  std::string host;
  int port = 0;
};

HostPort parse_addr(const std::string& text)
{
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0) throw UsageError("address must be HOST:PORT, got '" + text + "'");
  HostPort hp;
  hp.host = text.substr(0, colon);
  if (hp.host.size() > 2 && hp.host.front() == '[' && hp.host.back() == ']') hp.host = hp.host.substr(1, hp.host.size() - 2);
  const auto port = text.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), hp.port);
  if (ec != std::errc{} || ptr != port.data() + port.size() || hp.port < 0 || hp.port > 65535) {
    throw UsageError("invalid port in '" + text + "'");
  }
  return hp;
}

std::string number_text(const Json& v)
{
  if (v.is_null()) return "";
  if (v.is_number_float()) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v.get<double>());
    return std::string(buf, res.ptr);
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void write_csv(std::ostream& os, const std::vector<std::string>& row) { csv::write_row(os, row); }

// CSV flattenings of the export bodies. Columns are fixed per report.
void timeseries_csv(std::ostream& os, const Json& body)
{
  write_csv(os, {"series", "bucket", "count"});
  for (const char* series : {"scope_series", "city_series"}) {
    const std::string name = std::string(series) == "scope_series" ? body["scope"].get<std::string>() : "city";
    for (const auto& p : body[series]["points"]) write_csv(os, {name, p["bucket"].get<std::string>(), number_text(p["count"])});
  }
}

void npus_csv(std::ostream& os, const Json& body)
{
  write_csv(os, {"npu", "value", "westside"});
  for (const auto& e : body["npus"]) write_csv(os, {e["npu"].get<std::string>(), number_text(e["value"]), number_text(e["westside"])});
}

void type_share_csv(std::ostream& os, const Json& body)
{
  write_csv(os, {"series", "type", "percent"});
  for (const auto& [key, label] : {std::pair{"scope_shares", body["scope"].get<std::string>()}, std::pair{"city_shares", std::string("city")}}) {
    for (const auto& [type, pct] : body[key].items()) write_csv(os, {label, type, number_text(pct)});
  }
}

void correlations_csv(std::ostream& os, const Json& body)
{
  write_csv(os, {"factor", "measure", "scope", "r", "n", "excluded"});
  for (const auto& r : body["results"]) {
    write_csv(os, {r["factor"].get<std::string>(), r["measure"].get<std::string>(), r["scope"].get<std::string>(),
                   number_text(r["r"]), number_text(r["n"]), number_text(r["excluded"])});
  }
}

void hexes_csv(std::ostream& os, const Json& body)
{
  HexGridConfig cfg;
  cfg.hex_size_m = body["hex_size_m"].get<double>();
  cfg.origin = GeoPoint{body["origin"][1].get<double>(), body["origin"][0].get<double>()};
  write_csv(os, {"q", "r", "count", "color_class", "lat", "lon"});
  for (const auto& f : body["features"]) {
    const auto& pr = f["properties"];
    const HexCoord h{pr["q"].get<int>(), pr["r"].get<int>()};
    const auto c = canonical(hex_center(h, cfg));
    write_csv(os, {number_text(pr["q"]), number_text(pr["r"]), number_text(pr["count"]), number_text(pr["color_class"]),
                   number_text(Json(c.lat)), number_text(Json(c.lon))});
  }
}

std::ostream& print_dataset(std::ostream& os, const char* name, const DatasetReport& r)
{
  return os << name << ": parsed=" << r.parsed << " row_errors=" << r.row_errors << " located=" << r.located
            << " geocoded=" << r.geocoded << " geocode_failed=" << r.geocode_failed << " unjoined=" << r.unjoined
            << " coerced=" << r.coerced << "\n";
}

void print_report(std::ostream& os, const IngestReport& rep)
{
  print_dataset(os, "crimes", rep.crimes);
  print_dataset(os, "violations", rep.violations);
  print_dataset(os, "assets", rep.assets);
  print_dataset(os, "census", rep.census);
}

std::ifstream open_input(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return in;
}

// Blocks SIGINT/SIGTERM for the calling thread and everything it spawns, then
// waits for one of them on a helper thread.
class SignalWatcher {
 public:
  explicit SignalWatcher(std::function<void()> on_signal) : on_signal_(std::move(on_signal))
  {
    sigemptyset(&set_);
    sigaddset(&set_, SIGINT);
    sigaddset(&set_, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set_, &old_);
    thread_ = std::thread([this] {
      const timespec tick{0, 200'000'000};
      while (!done_.load()) {
        if (sigtimedwait(&set_, nullptr, &tick) > 0) {
          on_signal_();
          return;
        }
      }
    });
  }
  ~SignalWatcher()
  {
    done_.store(true);
    thread_.join();
    pthread_sigmask(SIG_SETMASK, &old_, nullptr);
  }

 private:
  std::function<void()> on_signal_;
  sigset_t set_{};
  sigset_t old_{};
  std::atomic<bool> done_{false};
  std::thread thread_;
};

struct IngestArgs {
  IngestSources sources;
  std::string ucr_map;
  std::string geocode_cache;
  std::string geocoder = "none";
  std::string out;
  std::string built_at;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err)
{
  const UcrTable ucr = a.ucr_map.empty() ? UcrTable::defaults() : UcrTable::load(a.ucr_map);

  std::unique_ptr<Geocoder> upstream;
  if (a.geocoder == "stub") {
    const auto regions = load_regions_file(a.sources.regions);
    if (regions.empty()) throw UsageError("the stub geocoder needs at least one region");
    BBox box = regions.front().bbox();
    for (const auto& r : regions) box.extend(r.bbox());
    upstream = std::make_unique<StubGeocoder>(box);
  } else {
    upstream = std::make_unique<NoopGeocoder>();
  }
  std::unique_ptr<CachingGeocoder> cache;
  Geocoder* geocoder = upstream.get();
  if (!a.geocode_cache.empty()) {
    cache = std::make_unique<CachingGeocoder>(a.geocode_cache, std::move(upstream));
    geocoder = cache.get();
  }

  auto outcome = a.built_at.empty() ? ingest_files(a.sources, ucr, *geocoder)
                                    : ingest_files(a.sources, ucr, *geocoder, a.built_at);
  if (cache) cache->save();
  save_snapshot(outcome.snapshot, a.out);

  print_report(out, outcome.snapshot.report());
  out << "snapshot: " << a.out << "\n";
  for (std::size_t i = 0; i < outcome.errors.size() && i < kMaxPrintedRowErrors; ++i) {
    const auto& e = outcome.errors[i];
    err << e.dataset << ": row " << e.error.row << ": " << e.error.reason << "\n";
  }
  if (outcome.errors.size() > kMaxPrintedRowErrors) {
    err << "... " << outcome.errors.size() - kMaxPrintedRowErrors << " more row errors\n";
  }
  return kExitOk;
}

struct ServeArgs {
  std::string snapshot;
  std::string addr;
  std::vector<std::string> cors;
  bool enable_reload = false;
  bool quiet = false;
};

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err)
{
  std::string addr = a.addr;
  if (addr.empty()) {
    const char* env = std::getenv("SAFETY_DASH_ADDR");
    addr = env && *env ? env : kDefaultAddr;
  }
  const auto hp = parse_addr(addr);
  auto snap = std::make_shared<const DataSnapshot>(load_snapshot(a.snapshot));

  ApiOptions opts;
  opts.cors_origins = a.cors;
  opts.enable_reload = a.enable_reload;
  opts.snapshot_path = a.snapshot;
  Api api(std::move(snap), opts);

  ApiServer server(api, a.quiet ? nullptr : &err);
  const int port = server.bind(hp.host, hp.port);
  if (port < 0) {
    err << "error: cannot bind " << hp.host << ":" << hp.port << "\n";
    return kExitData;
  }
  out << "listening on http://" << hp.host << ":" << port << std::endl;

  {
    SignalWatcher watcher([&server] { server.stop(); });
    server.listen();
  }
  out << "stopped" << std::endl;
  return kExitOk;
}

struct ExportArgs {
  std::string snapshot;
  std::string what;
  std::string format = "json";
  std::string out;
  Params params;
};

int cmd_export(const ExportArgs& a, std::ostream& out)
{
  const auto snap = load_snapshot(a.snapshot);
  Json body;
  void (*flatten)(std::ostream&, const Json&) = nullptr;
  if (a.what == "timeseries") {
    body = api_timeseries(snap, a.params);
    flatten = timeseries_csv;
  } else if (a.what == "npus") {
    body = api_npus(snap, a.params);
    flatten = npus_csv;
  } else if (a.what == "type-share") {
    body = api_type_share(snap, a.params);
    flatten = type_share_csv;
  } else if (a.what == "correlations") {
    body = api_correlations(snap, a.params);
    flatten = correlations_csv;
  } else if (a.what == "hexes") {
    body = api_hexes(snap, a.params);
    flatten = hexes_csv;
  } else {
    throw UsageError("unknown export '" + a.what + "'");
  }

  std::ostringstream text;
  if (a.format == "json") {
    text << body.dump();
  } else {
    flatten(text, body);
  }
  if (a.out.empty() || a.out == "-") {
    out << text.str();
    if (a.format == "json") out << "\n";
  } else {
    std::ofstream f(a.out, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot write " + a.out);
    f << text.str();
    if (!f.flush()) throw FormatError("cannot write " + a.out);
  }
  return kExitOk;
}

int cmd_genfixture(const FixtureOptions& opts, const std::string& dir, std::ostream& out)
{
  const auto s = generate_fixture(opts, dir);
  out << "crimes=" << s.crimes << " without_coordinates=" << s.crimes_without_coordinates
      << " violations=" << s.violations << " assets=" << s.assets << " npus=" << s.npus
      << " neighborhoods=" << s.neighborhoods << "\n";
  out << "fixture: " << dir << "\n";
  return kExitOk;
}

struct ValidateArgs {
  IngestSources sources;
  std::string ucr_map;
  bool strict = false;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err)
{
  bool fatal = false;
  std::size_t row_errors = 0;
  auto check = [&](const char* name, const std::string& path, auto&& fn) {
    if (path.empty()) return;
    try {
      const auto [records, errors] = fn(path);
      out << name << ": " << records << " records, " << errors.size() << " row errors\n";
      for (std::size_t i = 0; i < errors.size() && i < kMaxPrintedRowErrors; ++i) {
        err << name << ": row " << errors[i].row << ": " << errors[i].reason << "\n";
      }
      row_errors += errors.size();
    } catch (const std::exception& e) {
      fatal = true;
      err << name << ": " << e.what() << "\n";
    }
  };
  const UcrTable ucr = a.ucr_map.empty() ? UcrTable::defaults() : UcrTable::load(a.ucr_map);
  check("crimes", a.sources.crimes, [&](const std::string& p) {
    auto in = open_input(p);
    auto r = parse_crimes(in, ucr);
    return std::pair{r.records.size(), r.errors};
  });
  check("violations", a.sources.violations, [](const std::string& p) {
    auto in = open_input(p);
    auto r = parse_violations(in);
    return std::pair{r.records.size(), r.errors};
  });
  check("assets", a.sources.assets, [](const std::string& p) {
    auto in = open_input(p);
    auto r = parse_assets(in);
    return std::pair{r.records.size(), r.errors};
  });
  check("census", a.sources.census, [](const std::string& p) {
    auto in = open_input(p);
    auto r = parse_census(in);
    return std::pair{r.profiles.size(), r.errors};
  });
  check("regions", a.sources.regions, [](const std::string& p) {
    return std::pair{load_regions_file(p).size(), std::vector<RowError>{}};
  });
  if (fatal || (a.strict && row_errors > 0)) return kExitData;
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Crime and code-violation dashboard tools", "safetydash"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  auto add_sources = [](CLI::App* sub, IngestSources& s, bool required) {
    auto opt = [&](const char* flag, std::string& dest, const char* what) {
      auto* o = sub->add_option(flag, dest, what);
      if (required) o->required();
    };
    opt("--crimes", s.crimes, "Crime incidents CSV");
    opt("--violations", s.violations, "Code violations CSV");
    opt("--assets", s.assets, "Community assets CSV");
    opt("--census", s.census, "Census factors CSV");
    opt("--regions", s.regions, "NPU/neighborhood boundaries GeoJSON");
  };

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Build a snapshot from source files");
  add_sources(ingest_cmd, ingest.sources, true);
  ingest_cmd->add_option("--ucr-map", ingest.ucr_map, "UCR code to category table");
  ingest_cmd->add_option("--geocode-cache", ingest.geocode_cache, "Address cache CSV (read and updated)");
  ingest_cmd->add_option("--geocoder", ingest.geocoder, "Geocoder for rows without coordinates")
      ->check(CLI::IsMember({"none", "stub"}));
  ingest_cmd->add_option("--built-at", ingest.built_at, "Override the snapshot timestamp");
  ingest_cmd->add_option("--out", ingest.out, "Snapshot output path")->required();

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the JSON API over HTTP");
  serve_cmd->add_option("--snapshot", serve.snapshot, "Snapshot file")->required();
  serve_cmd->add_option("--addr", serve.addr, "HOST:PORT (default $SAFETY_DASH_ADDR or 127.0.0.1:8080)");
  serve_cmd->add_option("--cors-origin", serve.cors, "Allowed CORS origin; repeatable, '*' for any");
  serve_cmd->add_flag("--enable-reload", serve.enable_reload, "Allow POST /admin/reload from loopback");
  serve_cmd->add_flag("--quiet", serve.quiet, "No request log");

  ExportArgs exp;
  std::map<std::string, std::string> exp_opts;
  auto* export_cmd = app.add_subcommand("export", "Write one report as JSON or CSV");
  export_cmd->add_option("--snapshot", exp.snapshot, "Snapshot file")->required();
  export_cmd->add_option("--what", exp.what, "Report")
      ->required()
      ->check(CLI::IsMember({"timeseries", "npus", "type-share", "correlations", "hexes"}));
  export_cmd->add_option("--format", exp.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  export_cmd->add_option("--out", exp.out, "Output path (default stdout)");
  for (const char* name : {"dataset", "scope", "granularity", "from", "to", "per-capita", "types", "measure", "factors",
                           "span", "categories", "ucr", "hex-size"}) {
    export_cmd->add_option(std::string("--") + name, exp_opts[name], std::string("Query parameter ") + name);
  }

  FixtureOptions fixture;
  std::string fixture_dir;
  auto* fixture_cmd = app.add_subcommand("genfixture", "Write a synthetic data set");
  fixture_cmd->add_option("--crimes", fixture.crimes, "Crime rows");
  fixture_cmd->add_option("--violations", fixture.violations, "Violation rows");
  fixture_cmd->add_option("--assets", fixture.assets, "Asset rows");
  fixture_cmd->add_option("--seed", fixture.seed, "Random seed");
  fixture_cmd->add_option("--out", fixture_dir, "Output directory")->required();

  ValidateArgs validate;
  auto* validate_cmd = app.add_subcommand("validate", "Check source files without building a snapshot");
  add_sources(validate_cmd, validate.sources, false);
  validate_cmd->add_option("--ucr-map", validate.ucr_map, "UCR code to category table");
  validate_cmd->add_flag("--strict", validate.strict, "Fail on row errors too");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }

  try {
    if (*ingest_cmd) return cmd_ingest(ingest, out, err);
    if (*serve_cmd) return cmd_serve(serve, out, err);
    if (*export_cmd) {
      for (const auto& [name, value] : exp_opts) {
        if (value.empty()) continue;
        std::string key = name;
        for (auto& ch : key) if (ch == '-') ch = '_';
        exp.params[key] = value;
      }
      return cmd_export(exp, out);
    }
    if (*fixture_cmd) return cmd_genfixture(fixture, fixture_dir, out);
    if (*validate_cmd) return cmd_validate(validate, out, err);
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const DomainError& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kExitData;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ReferentialError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "unexpected error: " << e.what() << "\n";
    return kExitUnexpected;
  }
  return kExitData;
}

}  // namespace safetydash
