#include "safetydash/geo.hpp"

#include "safetydash/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

namespace safetydash {

namespace {

// Distance (degrees) under which a point counts as lying on an edge.
constexpr double kBoundaryEps = 1e-11;

bool on_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b)
{
  if (p.lon < std::min(a.lon, b.lon) - kBoundaryEps || p.lon > std::max(a.lon, b.lon) + kBoundaryEps ||
      p.lat < std::min(a.lat, b.lat) - kBoundaryEps || p.lat > std::max(a.lat, b.lat) + kBoundaryEps) {
    return false;
  }
  const double dx = b.lon - a.lon;
  const double dy = b.lat - a.lat;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) {
    return std::hypot(p.lon - a.lon, p.lat - a.lat) <= kBoundaryEps;
  }
  const double cross = dx * (p.lat - a.lat) - dy * (p.lon - a.lon);
  return std::abs(cross) <= kBoundaryEps * std::sqrt(len2);
}

// Returns +1 inside, 0 on boundary, -1 outside.
int classify_ring(const GeoPoint& p, const Ring& ring)
{
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[j];
    if (on_segment(p, a, b)) return 0;
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (p.lon < x) inside = !inside;
    }
  }
  return inside ? 1 : -1;
}

}  // namespace

bool is_valid(const GeoPoint& p)
{
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 &&
         p.lon <= 180.0;
}

std::string_view to_string(RegionKind kind)
{
  switch (kind) {
    case RegionKind::npu: return "npu";
    case RegionKind::neighborhood: return "neighborhood";
    case RegionKind::city: return "city";
  }
  return "npu";
}

std::optional<RegionKind> parse_region_kind(std::string_view text)
{
  if (text == "npu") return RegionKind::npu;
  if (text == "neighborhood") return RegionKind::neighborhood;
  if (text == "city") return RegionKind::city;
  return std::nullopt;
}

void BBox::extend(const BBox& o)
{
  min_lat = std::min(min_lat, o.min_lat);
  min_lon = std::min(min_lon, o.min_lon);
  max_lat = std::max(max_lat, o.max_lat);
  max_lon = std::max(max_lon, o.max_lon);
}

BBox GeoRegion::bbox() const
{
  BBox box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& poly : polygons)
    for (const auto& ring : poly)
      for (const auto& p : ring) box.extend(BBox::of(p));
  return box;
}

std::size_t GeoRegion::ring_count() const
{
  std::size_t n = 0;
  for (const auto& poly : polygons) n += poly.size();
  return n;
}

void validate(const GeoRegion& region)
{
  const std::string where = "region '" + region.id + "'";
  if (region.id.empty()) throw ValidationError("region with empty id");
  if (region.population < 0) throw ValidationError(where + ": negative population");
  if (region.ring_count() == 0) throw ValidationError(where + ": no rings");
  for (const auto& poly : region.polygons) {
    if (poly.empty()) throw ValidationError(where + ": polygon without rings");
    for (const auto& ring : poly) {
      if (ring.size() < 4) throw ValidationError(where + ": ring has fewer than 4 points");
      if (!(ring.front() == ring.back())) throw ValidationError(where + ": ring is not closed");
      for (const auto& p : ring) {
        if (!is_valid(p)) throw ValidationError(where + ": coordinate out of range");
      }
    }
  }
}

void validate(std::span<const GeoRegion> regions)
{
  std::set<std::pair<RegionKind, std::string>> seen;
  for (const auto& r : regions) {
    validate(r);
    if (!seen.emplace(r.kind, r.id).second) {
      throw ValidationError("duplicate " + std::string(to_string(r.kind)) + " id '" + r.id + "'");
    }
  }
}

bool contains_unchecked(const GeoPoint& p, const GeoRegion& region)
{
  bool inside = false;
  for (const auto& poly : region.polygons) {
    for (const auto& ring : poly) {
      const int c = classify_ring(p, ring);
      if (c == 0) return true;
      if (c > 0) inside = !inside;
    }
  }
  return inside;
}

bool point_in_polygon(const GeoPoint& p, const GeoRegion& region)
{
  validate(region);
  return contains_unchecked(p, region);
}

std::optional<std::string> assign_region(const GeoPoint& p, std::span<const GeoRegion> regions)
{
  const GeoRegion* best = nullptr;
  for (const auto& r : regions) {
    if (best && r.id >= best->id) continue;
    if (!r.bbox().contains(p)) continue;
    if (contains_unchecked(p, r)) best = &r;
  }
  if (!best) return std::nullopt;
  return best->id;
}

std::optional<GeoPoint> interior_point(const GeoRegion& region)
{
  const BBox box = region.bbox();
  if (!(box.max_lat > box.min_lat)) return std::nullopt;
  // Try a few scanlines in case the first hits a vertex-aligned degenerate span.
  for (double frac : {0.5, 0.37, 0.63, 0.21, 0.79}) {
    const double y = box.min_lat + frac * (box.max_lat - box.min_lat);
    std::vector<double> xs;
    for (const auto& poly : region.polygons) {
      for (const auto& ring : poly) {
        for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
          const GeoPoint& a = ring[i];
          const GeoPoint& b = ring[j];
          if ((a.lat > y) != (b.lat > y)) {
            xs.push_back(a.lon + (y - a.lat) * (b.lon - a.lon) / (b.lat - a.lat));
          }
        }
      }
    }
    std::sort(xs.begin(), xs.end());
    double best_width = 0.0;
    double best_x = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      const double w = xs[i + 1] - xs[i];
      if (w > best_width) {
        best_width = w;
        best_x = 0.5 * (xs[i] + xs[i + 1]);
      }
    }
    if (best_width > 0.0) {
      GeoPoint p{y, best_x};
      if (contains_unchecked(p, region)) return p;
    }
  }
  return std::nullopt;
}

RegionIndex::RegionIndex(std::span<const GeoRegion> regions, RegionKind kind, int grid) : grid_(grid)
{
  for (const auto& r : regions) {
    if (r.kind == kind) regions_.push_back(&r);
  }
  std::sort(regions_.begin(), regions_.end(), [](const GeoRegion* a, const GeoRegion* b) { return a->id < b->id; });
  if (regions_.empty()) return;

  boxes_.reserve(regions_.size());
  extent_ = regions_.front()->bbox();
  for (const auto* r : regions_) {
    boxes_.push_back(r->bbox());
    extent_.extend(boxes_.back());
  }
  cell_lat_ = std::max((extent_.max_lat - extent_.min_lat) / grid_, 1e-12);
  cell_lon_ = std::max((extent_.max_lon - extent_.min_lon) / grid_, 1e-12);
  cells_.assign(static_cast<std::size_t>(grid_) * grid_, {});

  auto clamp_cell = [this](double v) { return std::clamp(static_cast<int>(std::floor(v)), 0, grid_ - 1); };
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    const BBox& b = boxes_[i];
    const int r0 = clamp_cell((b.min_lat - extent_.min_lat) / cell_lat_);
    const int r1 = clamp_cell((b.max_lat - extent_.min_lat) / cell_lat_);
    const int c0 = clamp_cell((b.min_lon - extent_.min_lon) / cell_lon_);
    const int c1 = clamp_cell((b.max_lon - extent_.min_lon) / cell_lon_);
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) cells_[static_cast<std::size_t>(r) * grid_ + c].push_back(i);
  }
}

const std::vector<std::size_t>* RegionIndex::cell_for(const GeoPoint& p) const
{
  if (regions_.empty() || !extent_.contains(p)) return nullptr;
  const int r = std::min(static_cast<int>((p.lat - extent_.min_lat) / cell_lat_), grid_ - 1);
  const int c = std::min(static_cast<int>((p.lon - extent_.min_lon) / cell_lon_), grid_ - 1);
  return &cells_[static_cast<std::size_t>(r) * grid_ + c];
}

std::optional<std::string> RegionIndex::assign(const GeoPoint& p) const
{
  const auto* cell = cell_for(p);
  if (!cell) return std::nullopt;
  for (std::size_t i : *cell) {
    if (boxes_[i].contains(p) && contains_unchecked(p, *regions_[i])) return regions_[i]->id;
  }
  return std::nullopt;
}

std::size_t RegionIndex::candidate_count(const GeoPoint& p) const
{
  const auto* cell = cell_for(p);
  if (!cell) return 0;
  return static_cast<std::size_t>(
      std::count_if(cell->begin(), cell->end(), [&](std::size_t i) { return boxes_[i].contains(p); }));
}

}  // namespace safetydash
