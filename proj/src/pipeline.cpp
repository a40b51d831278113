#include "safetydash/pipeline.hpp"

#include "safetydash/error.hpp"
#include "safetydash/geojson.hpp"

#include <fstream>

namespace safetydash {

namespace {

std::ifstream open_input(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read '" + path + "'");
  return in;
}

void collect(std::vector<LabeledRowError>& out, const std::string& dataset, const std::vector<RowError>& errors)
{
  for (const auto& e : errors) out.push_back({dataset, e});
}

}  // namespace

IngestOutcome ingest_files(const IngestSources& sources, const UcrTable& ucr, Geocoder& geocoder,
                           std::string built_at)
{
  SnapshotInputs in;
  std::vector<LabeledRowError> errors;

  in.regions = load_regions_file(sources.regions);

  auto crimes_in = open_input(sources.crimes);
  auto crimes = parse_crimes(crimes_in, ucr);
  auto violations_in = open_input(sources.violations);
  auto violations = parse_violations(violations_in);
  auto assets_in = open_input(sources.assets);
  auto assets = parse_assets(assets_in);
  auto census_in = open_input(sources.census);
  in.census = parse_census(census_in);

  collect(errors, "crimes", crimes.errors);
  collect(errors, "violations", violations.errors);
  collect(errors, "assets", assets.errors);
  collect(errors, "census", in.census.errors);

  const auto crimes_geo = geocode_missing(crimes.records, geocoder);
  const auto violations_geo = geocode_missing(violations.records, geocoder);

  in.partial.crimes.row_errors = crimes.errors.size();
  in.partial.crimes.coerced = crimes.coerced;
  in.partial.crimes.geocoded = crimes_geo.geocoded;
  in.partial.violations.row_errors = violations.errors.size();
  in.partial.violations.coerced = violations.coerced;
  in.partial.violations.geocoded = violations_geo.geocoded;
  in.partial.assets.row_errors = assets.errors.size();

  in.crimes = std::move(crimes.records);
  in.violations = std::move(violations.records);
  in.assets = std::move(assets.records);

  // build_snapshot performs the spatial join over the (now geocoded) records.
  IngestOutcome out{build_snapshot(std::move(in), std::move(built_at)), std::move(errors), crimes_geo,
                    violations_geo};
  return out;
}

}  // namespace safetydash
