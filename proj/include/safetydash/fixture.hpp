#pragma once

#include "safetydash/geo.hpp"

#include <cstdint>
#include <string>

namespace safetydash {

// Share of crime rows without coordinates in the reference city export
// (9,712 of 875,491).
inline constexpr double kMissingCoordinateRatio = 9712.0 / 875491.0;

struct FixtureOptions {
  std::size_t crimes = 10000;
  std::size_t violations = 2000;
  std::size_t assets = 60;
  std::uint64_t seed = 1;
};

struct FixtureSummary {
  std::size_t crimes = 0;
  std::size_t crimes_without_coordinates = 0;
  std::size_t violations = 0;
  std::size_t assets = 0;
  std::size_t npus = 0;
  std::size_t neighborhoods = 0;
};

/// The synthetic city's outer bounds; geocoder stubs use it as their box.
BBox fixture_city_bounds();

/// Writes crimes.csv, violations.csv, assets.csv, census.csv,
/// regions.geojson, and ucr_categories.txt into dir (created if needed).
/// Output is a pure function of the options.
FixtureSummary generate_fixture(const FixtureOptions& options, const std::string& dir);

}  // namespace safetydash
