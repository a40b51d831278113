#pragma once

#include "safetydash/geo.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace safetydash {

/// Lower-cases, trims, and collapses internal whitespace runs.
std::string normalize_address(std::string_view address);

class Geocoder {
 public:
  virtual ~Geocoder() = default;
  virtual std::optional<GeoPoint> geocode(std::string_view address) = 0;
};

class NoopGeocoder final : public Geocoder {
 public:
  std::optional<GeoPoint> geocode(std::string_view) override { return std::nullopt; }
};

// Deterministic stand-in for a remote service: FNV-1a of the normalized
// address picks a point inside `box`. Empty addresses miss.
class StubGeocoder final : public Geocoder {
 public:
  explicit StubGeocoder(BBox box) : box_(box) {}
  std::optional<GeoPoint> geocode(std::string_view address) override;

 private:
  BBox box_;
};

// Persistent address -> point cache in front of an optional upstream geocoder.
// File format: CSV with header "address,lat,lon", keyed by normalized address.
class CachingGeocoder final : public Geocoder {
 public:
  CachingGeocoder(std::string path, std::unique_ptr<Geocoder> upstream);

  std::optional<GeoPoint> geocode(std::string_view address) override;

  /// Writes the cache back (sorted by address). Throws FormatError on I/O failure.
  void save() const;

  std::size_t hits() const { return hits_; }
  std::size_t size() const { return cache_.size(); }

 private:
  std::string path_;
  std::unique_ptr<Geocoder> upstream_;
  std::map<std::string, GeoPoint> cache_;
  std::size_t hits_ = 0;
};

}  // namespace safetydash
