#pragma once

#include "sandbox/common/geo.hpp"
#include "sandbox/common/json.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace sandbox {

inline constexpr std::string_view kUnknownRegion = "unknown";

struct Region {
  std::string id;        // "US", "CA", "IT"
  std::string name;      // "United States"
  std::string currency;  // ISO 4217
  int mcc = 0;           // mobile country code for synthesized cell ids
  int mnc = 0;
  std::vector<std::vector<geo::LatLon>> polygons;
};

// Coarse country outlines; good to tens of kilometres, enough to tell a
// spoofed Toronto from Buffalo or Rome from the sea.
class RegionTable {
 public:
  RegionTable() = default;
  explicit RegionTable(std::vector<Region> regions) : regions_(std::move(regions)) {}

  static const RegionTable& bundled();
  static RegionTable from_json(const Json& j);
  static RegionTable load(const std::string& path);
  Json to_json() const;

  // Region id containing the point, or "unknown".
  std::string lookup(geo::LatLon p) const;
  const Region* find(std::string_view id) const;
  const std::vector<Region>& regions() const { return regions_; }

 private:
  std::vector<Region> regions_;
};

// Even-odd ray casting in the (lon, lat) plane.
bool point_in_polygon(geo::LatLon p, const std::vector<geo::LatLon>& polygon);

}  // namespace sandbox
