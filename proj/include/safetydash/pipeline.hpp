#pragma once

#include "safetydash/geocoder.hpp"
#include "safetydash/snapshot.hpp"
#include "safetydash/ucr.hpp"

#include <string>
#include <vector>

namespace safetydash {

struct IngestSources {
  std::string crimes;
  std::string violations;
  std::string assets;
  std::string census;
  std::string regions;
};

struct LabeledRowError {
  std::string dataset;
  RowError error;
};

struct IngestOutcome {
  DataSnapshot snapshot;
  std::vector<LabeledRowError> errors;
  GeocodeStats crimes_geocode;
  GeocodeStats violations_geocode;
};

/// parse -> geocode_missing -> spatial_join -> build_snapshot over the five
/// source files. Throws SchemaError, ReferentialError, ValidationError, or
/// FormatError; row problems are collected, never fatal.
IngestOutcome ingest_files(const IngestSources& sources, const UcrTable& ucr, Geocoder& geocoder,
                           std::string built_at = utc_now_iso());

}  // namespace safetydash
