#pragma once

// Domain description files (JSON) to and from specs.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ringmod/errors.hpp"
#include "ringmod/expr.hpp"
#include "ringmod/geometry.hpp"
#include "ringmod/strip.hpp"

namespace ringmod::io {

using json = nlohmann::json;

namespace detail {

inline double num(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw rejection(std::string("domain file: missing number '") + key + "'");
  return j[key].get<double>();
}

inline point pt(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw rejection("domain file: a point is [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline point pt(const json& j, const char* key) {
  if (!j.contains(key)) throw rejection(std::string("domain file: missing point '") + key + "'");
  return pt(j[key]);
}

inline std::vector<point> pts(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw rejection(std::string("domain file: missing list '") + key + "'");
  std::vector<point> out;
  for (const auto& p : j[key]) out.push_back(pt(p));
  return out;
}

inline json to_json(point z) { return json::array({z.real(), z.imag()}); }

inline std::string kind_of(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) throw rejection("domain file: missing \"kind\"");
  return j["kind"].get<std::string>();
}

}  // namespace detail

inline domain_spec domain_from_json(const json& j) {
  using namespace detail;
  const std::string k = kind_of(j);
  if (k == "disk") return domain_spec(disk{j.contains("center") ? pt(j, "center") : point(0.0), num(j, "radius")});
  if (k == "annulus") return domain_spec(annulus{num(j, "r"), num(j, "R")});
  if (k == "polygon") return domain_spec(polygon{pts(j, "vertices")});
  if (k == "grotzsch") return domain_spec(grotzsch{num(j, "P")});
  if (k == "teichmuller") return domain_spec(teichmuller{num(j, "rho"), num(j, "P")});
  if (k == "slit-annulus") return domain_spec(slit_annulus{num(j, "R"), num(j, "P")});
  if (k == "plane-minus-slits") {
    if (!j.contains("slits") || !j["slits"].is_array()) throw rejection("domain file: missing list 'slits'");
    plane_minus_slits p;
    for (const auto& s : j["slits"]) p.slits.push_back({pt(s, "from"), pt(s, "to"), s.value("ray", false)});
    return domain_spec(std::move(p));
  }
  if (k == "complement-of") {
    if (!j.contains("base")) throw rejection("domain file: complement-of needs 'base'");
    return complement(domain_from_json(j["base"]));
  }
  throw rejection("domain file: unknown kind '" + k + "'");
}

inline json to_json(const domain_spec& d) {
  using detail::to_json;
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, disk>) return {{"kind", "disk"}, {"center", to_json(k.center)}, {"radius", k.radius}};
        else if constexpr (std::is_same_v<K, annulus>) return {{"kind", "annulus"}, {"r", k.r}, {"R", k.R}};
        else if constexpr (std::is_same_v<K, polygon>) {
          json v = json::array();
          for (auto z : k.vertices) v.push_back(to_json(z));
          return {{"kind", "polygon"}, {"vertices", v}};
        } else if constexpr (std::is_same_v<K, grotzsch>) return {{"kind", "grotzsch"}, {"P", k.P}};
        else if constexpr (std::is_same_v<K, teichmuller>) return {{"kind", "teichmuller"}, {"rho", k.rho}, {"P", k.P}};
        else if constexpr (std::is_same_v<K, slit_annulus>) return {{"kind", "slit-annulus"}, {"R", k.R2}, {"P", k.P1}};
        else if constexpr (std::is_same_v<K, plane_minus_slits>) {
          json v = json::array();
          for (const auto& s : k.slits) v.push_back({{"from", to_json(s.from)}, {"to", to_json(s.to)}, {"ray", s.ray}});
          return {{"kind", "plane-minus-slits"}, {"slits", v}};
        } else return {{"kind", "complement-of"}, {"base", io::to_json(*k.base)}};
      },
      d.kind());
}

/// {"outer": .., "inner": ..} or a named ring kind.
inline ring_domain_spec ring_from_json(const json& j) {
  if (j.is_object() && j.contains("outer") && j.contains("inner"))
    return ring_domain_spec::between(domain_from_json(j["outer"]), domain_from_json(j["inner"]));
  return ring_domain_spec::named(domain_from_json(j));
}

/// A polygon with "marks", or "kind": "rectangle" with width and height.
inline quadrilateral_spec quad_from_json(const json& j) {
  using namespace detail;
  const std::string k = kind_of(j);
  if (k == "rectangle") return quadrilateral_spec::rectangle(num(j, "width"), num(j, "height"));
  if (k != "polygon" && k != "quadrilateral") throw rejection("domain file: a quadrilateral is a polygon with marks");
  if (!j.contains("marks") || !j["marks"].is_array() || j["marks"].size() != 4)
    throw rejection("domain file: quadrilateral needs four 'marks'");
  std::array<int, 4> m{};
  for (int i = 0; i < 4; ++i) m[i] = j["marks"][i].get<int>();
  return quadrilateral_spec(pts(j, "vertices"), m);
}

/// Window polygon with "ends": [[x, y], [x, y]], optional "map" (expression in z) and "B".
/// Named fixtures: straight, sector, comb.
inline strip_spec strip_from_json(const json& j) {
  using namespace detail;
  const std::string k = kind_of(j);
  if (k == "straight") return strip_spec::straight(num(j, "B"), num(j, "x_lo"), num(j, "x_hi"));
  if (k == "sector") return strip_spec::sector(num(j, "beta"), num(j, "length"));
  if (k == "comb")
    return strip_spec::comb(num(j, "B"), num(j, "x_lo"), num(j, "x_hi"), num(j, "t0"), num(j, "t1"), num(j, "gap"));
  if (k != "strip" && k != "polygon") throw rejection("domain file: unknown strip kind '" + k + "'");
  if (!j.contains("ends") || !j["ends"].is_array() || j["ends"].size() != 2) throw rejection("domain file: strip needs two 'ends'");
  strip_spec s(pts(j, "vertices"), pt(j["ends"][0]), pt(j["ends"][1]));
  if (j.contains("map")) s.with_map(expr::parse(j["map"].get<std::string>(), 'z'), num(j, "B"));
  return s;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw rejection("domain file '" + path + "': " + e.what());
  }
}

}  // namespace ringmod::io
