#pragma once

#include "safetydash/geo.hpp"

#include <compare>

namespace safetydash {

inline constexpr double kEarthRadiusM = 6'371'000.0;
inline constexpr double kDefaultHexSizeM = 150.0;

// Pointy-top hex grid anchored at origin. Positions are projected to local
// meters with an equirectangular projection about the origin latitude.
struct HexGridConfig {
  GeoPoint origin;
  double hex_size_m = kDefaultHexSizeM;  // center-to-vertex

  double ref_lat() const { return origin.lat; }

  friend bool operator==(const HexGridConfig&, const HexGridConfig&) = default;
};

/// Throws DomainError(bad_param) unless hex_size_m > 0 and origin is valid.
void validate(const HexGridConfig& cfg);

// Axial coordinates. q grows eastward; r grows southward along the NE-SW axis,
// so the center of (q, r) sits at x = sqrt(3)*size*(q - r/2), y = -1.5*size*r
// (x east, y north). (1, 0) is the east neighbor, (0, -1) the north-east one.
struct HexCoord {
  int q = 0;
  int r = 0;

  friend auto operator<=>(const HexCoord&, const HexCoord&) = default;
};

struct LocalXY {
  double x = 0.0;  // meters east of origin
  double y = 0.0;  // meters north of origin
};

LocalXY project(const GeoPoint& p, const HexGridConfig& cfg);
GeoPoint unproject(const LocalXY& xy, const HexGridConfig& cfg);

LocalXY hex_center_xy(HexCoord h, const HexGridConfig& cfg);
GeoPoint hex_center(HexCoord h, const HexGridConfig& cfg);

HexCoord hex_index(const GeoPoint& p, const HexGridConfig& cfg);

/// Six vertices counter-clockwise starting at the east-north-east corner,
/// first repeated as last.
Ring hex_polygon(HexCoord h, const HexGridConfig& cfg);

}  // namespace safetydash
