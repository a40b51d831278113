#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace safetydash {

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p);

enum class RegionKind { npu, neighborhood, city };

std::string_view to_string(RegionKind kind);
std::optional<RegionKind> parse_region_kind(std::string_view text);

using Ring = std::vector<GeoPoint>;

struct BBox {
  double min_lat = 0.0;
  double min_lon = 0.0;
  double max_lat = 0.0;
  double max_lon = 0.0;

  bool contains(const GeoPoint& p) const
  {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
  }
  bool intersects(const BBox& o) const
  {
    return min_lat <= o.max_lat && o.min_lat <= max_lat && min_lon <= o.max_lon && o.min_lon <= max_lon;
  }
  void extend(const BBox& o);
  static BBox of(const GeoPoint& p) { return {p.lat, p.lon, p.lat, p.lon}; }
};

// A polygon is its outer ring followed by holes. Containment treats the rings
// of all polygons of a region uniformly (even-odd across rings).
struct GeoRegion {
  std::string id;
  RegionKind kind = RegionKind::npu;
  std::string name;
  std::vector<std::vector<Ring>> polygons;
  long long population = 0;  // 0 = unknown

  BBox bbox() const;
  std::size_t ring_count() const;

  friend bool operator==(const GeoRegion&, const GeoRegion&) = default;
};

/// Throws ValidationError for open rings, short rings, non-finite or
/// out-of-range coordinates, or an empty geometry.
void validate(const GeoRegion& region);

/// Throws ValidationError for duplicate ids within a kind (plus per-region checks).
void validate(std::span<const GeoRegion> regions);

/// Even-odd over all rings; points on an edge or vertex are inside.
bool point_in_polygon(const GeoPoint& p, const GeoRegion& region);

/// Same predicate without validation; for the hot path after validate().
bool contains_unchecked(const GeoPoint& p, const GeoRegion& region);

/// Smallest containing id wins when boundaries overlap.
std::optional<std::string> assign_region(const GeoPoint& p, std::span<const GeoRegion> regions);

/// A point strictly inside the region found by a horizontal scanline through
/// the bbox middle. Used to attribute neighborhoods to their NPU.
std::optional<GeoPoint> interior_point(const GeoRegion& region);

// Uniform-grid bounding-box index over the regions of a single kind. Each grid
// cell lists the regions whose bbox overlaps it, sorted by id, so the first
// containing candidate is also the tie-break winner.
class RegionIndex {
 public:
  RegionIndex() = default;
  RegionIndex(std::span<const GeoRegion> regions, RegionKind kind, int grid = 64);

  std::optional<std::string> assign(const GeoPoint& p) const;

  // Candidate count for p after the grid and bbox prefilter.
  std::size_t candidate_count(const GeoPoint& p) const;
  std::size_t size() const { return regions_.size(); }

 private:
  const std::vector<std::size_t>* cell_for(const GeoPoint& p) const;

  std::vector<const GeoRegion*> regions_;
  std::vector<BBox> boxes_;
  std::vector<std::vector<std::size_t>> cells_;
  BBox extent_{};
  int grid_ = 0;
  double cell_lat_ = 0.0;
  double cell_lon_ = 0.0;
};

}  // namespace safetydash
