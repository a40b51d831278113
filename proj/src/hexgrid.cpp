#include "safetydash/hexgrid.hpp"

#include "safetydash/error.hpp"

#include <cmath>
#include <numbers>

namespace safetydash {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kSqrt3 = std::numbers::sqrt3;

// Standard pointy-top axial (col, row) with y pointing south. Our public
// coordinates relate by q = col + row, r = row.
struct Cube {
  double col;
  double row;
};

HexCoord cube_round(Cube c)
{
  const double x = c.col;
  const double z = c.row;
  const double y = -x - z;
  double rx = std::round(x);
  double ry = std::round(y);
  double rz = std::round(z);
  const double dx = std::abs(rx - x);
  const double dy = std::abs(ry - y);
  const double dz = std::abs(rz - z);
  if (dx > dy && dx > dz) {
    rx = -ry - rz;
  } else if (dy > dz) {
    ry = -rx - rz;
  } else {
    rz = -rx - ry;
  }
  const int col = static_cast<int>(rx);
  const int row = static_cast<int>(rz);
  return {col + row, row};
}

}  // namespace

void validate(const HexGridConfig& cfg)
{
  if (!(cfg.hex_size_m > 0.0) || !std::isfinite(cfg.hex_size_m)) {
    throw DomainError(ErrorCode::bad_param, "hex size must be a positive number of meters");
  }
  if (!is_valid(cfg.origin)) throw DomainError(ErrorCode::bad_param, "hex grid origin out of range");
}

LocalXY project(const GeoPoint& p, const HexGridConfig& cfg)
{
  const double k = kEarthRadiusM * kDegToRad;
  return {k * (p.lon - cfg.origin.lon) * std::cos(cfg.ref_lat() * kDegToRad), k * (p.lat - cfg.origin.lat)};
}

GeoPoint unproject(const LocalXY& xy, const HexGridConfig& cfg)
{
  const double k = kEarthRadiusM * kDegToRad;
  return {cfg.origin.lat + xy.y / k, cfg.origin.lon + xy.x / (k * std::cos(cfg.ref_lat() * kDegToRad))};
}

LocalXY hex_center_xy(HexCoord h, const HexGridConfig& cfg)
{
  const double s = cfg.hex_size_m;
  return {kSqrt3 * s * (h.q - 0.5 * h.r), -1.5 * s * h.r};
}

GeoPoint hex_center(HexCoord h, const HexGridConfig& cfg) { return unproject(hex_center_xy(h, cfg), cfg); }

HexCoord hex_index(const GeoPoint& p, const HexGridConfig& cfg)
{
  const LocalXY xy = project(p, cfg);
  const double s = cfg.hex_size_m;
  const double south = -xy.y;
  const double row = (2.0 / 3.0) * south / s;
  const double col = (kSqrt3 / 3.0 * xy.x - south / 3.0) / s;
  return cube_round({col, row});
}

Ring hex_polygon(HexCoord h, const HexGridConfig& cfg)
{
  const LocalXY c = hex_center_xy(h, cfg);
  Ring ring;
  ring.reserve(7);
  for (int k = 0; k < 6; ++k) {
    const double angle = (30.0 + 60.0 * k) * kDegToRad;
    ring.push_back(unproject({c.x + cfg.hex_size_m * std::cos(angle), c.y + cfg.hex_size_m * std::sin(angle)}, cfg));
  }
  ring.push_back(ring.front());
  return ring;
}

}  // namespace safetydash
