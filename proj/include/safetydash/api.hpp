#pragma once

#include "safetydash/aggregate.hpp"
#include "safetydash/correlate.hpp"
#include "safetydash/geojson.hpp"
#include "safetydash/maplayer.hpp"
#include "safetydash/snapshot.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace safetydash {

using Params = std::map<std::string, std::string>;

// JSON renderings shared by the HTTP endpoints and the export command.
Json to_json(const TimeSeries& s);
Json to_json(const NpuCounts& c);
Json to_json(const TypeShare& s);
Json to_json(const CorrelationResult& r);
Json hexes_geojson(const std::vector<HexCell>& cells, const HexGridConfig& cfg);
Json clusters_geojson(const std::vector<PinCluster>& clusters);
Json assets_geojson(const std::vector<Asset>& assets);
Json meta_json(const DataSnapshot& snap);
Json error_json(int status, std::string_view code, std::string_view message);

// Endpoint bodies: parse the query parameters, run the library call, render.
// All throw DomainError on bad parameters or domain failures.
Json api_meta(const DataSnapshot& snap);
Json api_timeseries(const DataSnapshot& snap, const Params& p);
Json api_npus(const DataSnapshot& snap, const Params& p);
Json api_type_share(const DataSnapshot& snap, const Params& p);
Json api_correlations(const DataSnapshot& snap, const Params& p);
Json api_hexes(const DataSnapshot& snap, const Params& p, HexmapCache* cache = nullptr);
Json api_violations(const DataSnapshot& snap, const Params& p);
Json api_assets(const DataSnapshot& snap, const Params& p);
Json api_regions(const DataSnapshot& snap, const Params& p);

/// Parses true/false/1/0/yes/no; empty -> fallback. Throws DomainError(bad_param).
bool parse_bool_param(std::string_view text, bool fallback);

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct ApiOptions {
  std::vector<std::string> cors_origins;  // "*" allows any origin
  bool enable_reload = false;             // local-only POST /admin/reload
  std::string snapshot_path;              // reload source
  double cluster_cell_factor = kDefaultClusterCellFactor;
};

// Routes requests to endpoint bodies against the current snapshot. The
// snapshot pointer is swapped only by reload(); readers take a copy.
class Api {
 public:
  Api(std::shared_ptr<const DataSnapshot> snap, ApiOptions options = {});

  ApiResponse get(const std::string& path, const Params& params) const;

  /// Replaces the snapshot from options.snapshot_path; returns the new meta.
  ApiResponse reload();

  std::shared_ptr<const DataSnapshot> snapshot() const;
  const ApiOptions& options() const { return options_; }

  /// CORS allow-origin header value for a request origin, empty when denied.
  std::string allowed_origin(const std::string& origin) const;

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const DataSnapshot> snap_;
  ApiOptions options_;
  mutable HexmapCache cache_;
};

}  // namespace safetydash
