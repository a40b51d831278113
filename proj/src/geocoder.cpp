#include "safetydash/geocoder.hpp"

#include "safetydash/csv.hpp"
#include "safetydash/error.hpp"
#include "safetydash/records.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace safetydash {

std::string normalize_address(std::string_view address)
{
  std::string out;
  bool pending_space = false;
  for (char ch : address) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::optional<GeoPoint> StubGeocoder::geocode(std::string_view address)
{
  const std::string key = normalize_address(address);
  if (key.empty()) return std::nullopt;
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  // Two 26-bit fractions from independent halves of the hash.
  const double u = static_cast<double>(h & 0x3FFFFFF) / static_cast<double>(0x4000000);
  const double v = static_cast<double>((h >> 32) & 0x3FFFFFF) / static_cast<double>(0x4000000);
  return canonical(GeoPoint{box_.min_lat + v * (box_.max_lat - box_.min_lat),
                            box_.min_lon + u * (box_.max_lon - box_.min_lon)});
}

CachingGeocoder::CachingGeocoder(std::string path, std::unique_ptr<Geocoder> upstream)
    : path_(std::move(path)), upstream_(std::move(upstream))
{
  if (!std::filesystem::exists(path_)) return;
  std::ifstream in(path_);
  if (!in) throw FormatError("cannot read geocode cache '" + path_ + "'");
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) return;
  while (reader.next(row)) {
    if (row.size() != 3) throw FormatError("geocode cache line " + std::to_string(reader.line()) + ": expected 3 fields");
    char* end = nullptr;
    const double lat = std::strtod(row[1].c_str(), &end);
    const double lon = std::strtod(row[2].c_str(), &end);
    GeoPoint p{lat, lon};
    if (!is_valid(p)) throw FormatError("geocode cache line " + std::to_string(reader.line()) + ": bad coordinate");
    cache_[normalize_address(row[0])] = canonical(p);
  }
}

std::optional<GeoPoint> CachingGeocoder::geocode(std::string_view address)
{
  const std::string key = normalize_address(address);
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++hits_;
    return it->second;
  }
  if (!upstream_) return std::nullopt;
  auto p = upstream_->geocode(address);
  if (p) cache_[key] = canonical(*p);
  return p ? std::optional<GeoPoint>(canonical(*p)) : std::nullopt;
}

void CachingGeocoder::save() const
{
  std::ofstream out(path_, std::ios::trunc);
  if (!out) throw FormatError("cannot write geocode cache '" + path_ + "'");
  csv::write_row(out, {"address", "lat", "lon"});
  char lat[32];
  char lon[32];
  for (const auto& [addr, p] : cache_) {
    std::snprintf(lat, sizeof lat, "%.9g", p.lat);
    std::snprintf(lon, sizeof lon, "%.9g", p.lon);
    csv::write_row(out, {addr, lat, lon});
  }
  if (!out) throw FormatError("cannot write geocode cache '" + path_ + "'");
}

}  // namespace safetydash
