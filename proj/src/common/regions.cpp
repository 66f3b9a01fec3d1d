#include "sandbox/common/regions.hpp"

#include "sandbox/common/error.hpp"

#include <fstream>
#include <sstream>

namespace sandbox {
namespace {

std::vector<Region> bundled_regions() {
  // Vertices are (lat, lon), listed around each outline.
  Region us{"US", "United States", "USD", 310, 260, {}};
  us.polygons.push_back({
      {49.0, -123.3}, {49.0, -95.2}, {48.0, -89.5}, {46.5, -84.5}, {45.3, -82.5}, {43.0, -82.4},
      {42.3, -83.1},  {41.7, -82.7}, {42.6, -79.6}, {43.26, -79.06}, {43.6, -78.7}, {44.1, -76.4},
      {45.0, -74.7},  {45.0, -71.5}, {47.4, -69.2}, {47.1, -67.8}, {45.2, -67.8}, {44.8, -66.9},
      {41.3, -69.9},  {40.5, -73.9}, {35.2, -75.5}, {30.5, -81.2}, {25.0, -80.0}, {24.5, -81.8},
      {30.0, -84.0},  {30.2, -88.0}, {29.0, -89.3}, {29.5, -94.0}, {26.0, -97.1}, {29.8, -101.4},
      {31.8, -106.5}, {31.3, -111.0}, {32.5, -117.1}, {34.5, -120.6}, {40.4, -124.4}, {48.4, -124.7},
  });
  us.polygons.push_back({
      {60.0, -141.0}, {69.6, -141.0}, {71.4, -156.8}, {68.0, -166.0}, {60.0, -167.0}, {54.0, -165.0},
      {58.0, -152.0}, {59.8, -146.0},
  });
  us.polygons.push_back({{22.3, -160.3}, {22.3, -154.7}, {18.8, -154.7}, {18.8, -160.3}});

  Region ca{"CA", "Canada", "CAD", 302, 720, {}};
  ca.polygons.push_back({
      {60.0, -141.0}, {69.6, -141.0}, {83.0, -70.0}, {60.0, -64.0}, {47.0, -52.0}, {43.4, -65.9},
      {44.8, -66.9},  {45.2, -67.8}, {47.1, -67.8}, {47.4, -69.2}, {45.0, -71.5}, {45.0, -74.7},
      {44.1, -76.4},  {43.6, -78.7}, {43.26, -79.06}, {42.6, -79.6}, {41.7, -82.7}, {42.3, -83.1},
      {43.0, -82.4},  {45.3, -82.5}, {46.5, -84.5}, {48.0, -89.5}, {49.0, -95.2}, {49.0, -123.3},
      {48.3, -123.2}, {48.4, -124.7}, {54.7, -130.6}, {60.0, -139.0},
  });

  Region it{"IT", "Italy", "EUR", 222, 10, {}};
  it.polygons.push_back({
      {47.1, 12.2}, {46.5, 13.8}, {45.6, 13.9}, {44.4, 12.3}, {43.6, 13.6}, {42.0, 15.3}, {41.9, 16.2},
      {40.6, 18.6}, {39.8, 18.4}, {40.2, 16.8}, {39.0, 17.2}, {37.9, 16.1}, {38.3, 15.6}, {40.0, 15.5},
      {41.2, 13.5}, {42.4, 11.1}, {43.9, 10.1}, {44.4, 8.7},  {43.8, 7.5},  {44.2, 6.9},  {45.9, 7.0},
      {46.4, 8.4},  {46.0, 9.0},  {46.5, 10.4},
  });
  it.polygons.push_back({{38.3, 12.4}, {38.3, 15.7}, {36.6, 15.2}, {36.6, 12.4}});  // Sicily
  it.polygons.push_back({{41.3, 8.1}, {41.3, 9.8}, {38.8, 9.8}, {38.8, 8.1}});      // Sardinia

  return {us, ca, it};
}

}  // namespace

bool point_in_polygon(geo::LatLon p, const std::vector<geo::LatLon>& polygon) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = polygon[i];
    const auto& b = polygon[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double lon_at = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (p.lon < lon_at) inside = !inside;
    }
  }
  return inside;
}

const RegionTable& RegionTable::bundled() {
  static const RegionTable table(bundled_regions());
  return table;
}

std::string RegionTable::lookup(geo::LatLon p) const {
  if (!geo::valid(p)) return std::string(kUnknownRegion);
  for (const auto& r : regions_) {
    for (const auto& poly : r.polygons) {
      if (point_in_polygon(p, poly)) return r.id;
    }
  }
  return std::string(kUnknownRegion);
}

const Region* RegionTable::find(std::string_view id) const {
  for (const auto& r : regions_) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

Json RegionTable::to_json() const {
  Json arr = Json::array();
  for (const auto& r : regions_) {
    Json j;
    j["id"] = r.id;
    j["name"] = r.name;
    j["currency"] = r.currency;
    j["mcc"] = r.mcc;
    j["mnc"] = r.mnc;
    Json polys = Json::array();
    for (const auto& poly : r.polygons) {
      Json pts = Json::array();
      for (const auto& v : poly) pts.push_back(Json::array({v.lat, v.lon}));
      polys.push_back(pts);
    }
    j["polygons"] = polys;
    arr.push_back(j);
  }
  Json root;
  root["regions"] = arr;
  return root;
}

RegionTable RegionTable::from_json(const Json& j) {
  std::vector<Region> out;
  try {
    for (const auto& r : j.at("regions")) {
      Region region;
      region.id = r.at("id").get<std::string>();
      region.name = r.at("name").get<std::string>();
      region.currency = r.at("currency").get<std::string>();
      region.mcc = r.value("mcc", 0);
      region.mnc = r.value("mnc", 0);
      for (const auto& poly : r.at("polygons")) {
        std::vector<geo::LatLon> pts;
        for (const auto& v : poly) pts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        if (pts.size() < 3) throw Error(Errc::parse_error, "region polygon needs at least 3 vertices");
        region.polygons.push_back(std::move(pts));
      }
      out.push_back(std::move(region));
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::parse_error, std::string("region table: ") + e.what());
  }
  return RegionTable(std::move(out));
}

RegionTable RegionTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open region table '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const Json j = Json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::parse_error, "region table '" + path + "' is not JSON");
  return from_json(j);
}

}  // namespace sandbox
