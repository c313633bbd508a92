#pragma once

// Plane domains, ring domains, quadrilaterals and sampled curves.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ringmod/errors.hpp"

namespace ringmod {

using point = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

namespace geom {

inline double cross(point a, point b) { return a.real() * b.imag() - a.imag() * b.real(); }
inline double dot(point a, point b) { return a.real() * b.real() + a.imag() * b.imag(); }

inline double segment_distance(point p, point a, point b) {
  const point d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

/// Parameter t in [0,1] along p0->p1 where it meets segment a-b, if it does.
inline std::optional<double> segment_hit(point p0, point p1, point a, point b) {
  const point r = p1 - p0;
  const point s = b - a;
  const double denom = cross(r, s);
  if (denom == 0.0) return std::nullopt;
  const point q = a - p0;
  const double t = cross(q, s) / denom;
  const double u = cross(q, r) / denom;
  // A hair of slack so a line through a shared vertex still meets one of its segments.
  constexpr double eps = 1e-12;
  if (t < -eps || t > 1.0 + eps || u < -eps || u > 1.0 + eps) return std::nullopt;
  return std::clamp(t, 0.0, 1.0);
}

inline bool segments_cross(point a, point b, point c, point d) {
  return segment_hit(a, b, c, d).has_value();
}

inline double segment_segment_distance(point a, point b, point c, point d) {
  if (segments_cross(a, b, c, d)) return 0.0;
  return std::min({segment_distance(a, c, d), segment_distance(b, c, d), segment_distance(c, a, b),
                   segment_distance(d, a, b)});
}

/// Even-odd rule; points on the boundary may land either way.
inline bool point_in_polygon(point z, std::span<const point> poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const point a = poly[i];
    const point b = poly[j];
    if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
      const double x = a.real() + (z.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
      if (z.real() < x) inside = !inside;
    }
  }
  return inside;
}

inline double polygon_boundary_distance(point z, std::span<const point> poly) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i)
    best = std::min(best, segment_distance(z, poly[i], poly[(i + 1) % poly.size()]));
  return best;
}

inline double polygon_signed_area(std::span<const point> poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

inline bool is_simple_polygon(std::span<const point> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (poly[i] == poly[(i + 1) % n]) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return std::abs(polygon_signed_area(poly)) > 0.0;
}

inline bool is_convex_polygon(std::span<const point> poly) {
  const std::size_t n = poly.size();
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = cross(poly[(i + 1) % n] - poly[i], poly[(i + 2) % n] - poly[(i + 1) % n]);
    const int s = (c > 0) - (c < 0);
    if (s == 0) continue;
    if (sign == 0) sign = s;
    else if (s != sign) return false;
  }
  return sign != 0;
}

}  // namespace geom

/// Which boundary condition a piece of boundary carries.
enum class boundary_label : std::uint8_t { zero, one, neumann };

struct segment_piece {
  point a, b;
};
struct circle_piece {
  point center;
  double radius;
};

struct boundary_piece {
  std::variant<segment_piece, circle_piece> shape;
  boundary_label label;
};

// ---------------------------------------------------------------------------
// Domain descriptions

struct disk {
  point center{};
  double radius = 1.0;
};
struct annulus {
  double r = 1.0;
  double R = 2.0;
};
/// A simple closed polygon; two vertices describe a segment (usable only as a continuum).
struct polygon {
  std::vector<point> vertices;
};
/// Exterior of the unit disk cut along [P, +inf).
struct grotzsch {
  double P = 2.0;
};
/// Plane cut along [-rho, 0] and [P, +inf).
struct teichmuller {
  double rho = 1.0;
  double P = 1.0;
};
/// 1 < |z| < R2 cut along [P1, R2].
struct slit_annulus {
  double R2 = 4.0;
  double P1 = 2.0;
};
/// Segment from `from` to `to`; with `ray`, the half-line from `from` through `to`.
struct slit {
  point from{};
  point to{};
  bool ray = false;
};
struct plane_minus_slits {
  std::vector<slit> slits;
};

class domain_spec;
struct complement_of {
  std::shared_ptr<const domain_spec> base;
};

class domain_spec {
 public:
  using kind_type = std::variant<disk, annulus, polygon, grotzsch, teichmuller, slit_annulus,
                                 plane_minus_slits, complement_of>;

  domain_spec(kind_type kind) : kind_(std::move(kind)) { validate(); }

  const kind_type& kind() const noexcept { return kind_; }

  template <class K>
  const K* as() const noexcept {
    return std::get_if<K>(&kind_);
  }

  std::string kind_name() const {
    static constexpr std::array names{"disk",         "annulus",           "polygon",
                                      "grotzsch",     "teichmuller",       "slit-annulus",
                                      "plane-minus-slits", "complement-of"};
    return names[kind_.index()];
  }

  bool is_ring_kind() const noexcept {
    return as<annulus>() || as<grotzsch>() || as<teichmuller>() || as<slit_annulus>();
  }
  bool is_segment() const noexcept {
    const auto* p = as<polygon>();
    return p && p->vertices.size() == 2;
  }

  /// Membership in the open domain.
  bool contains(point z) const {
    return std::visit([&](const auto& k) { return contains_impl(k, z); }, kind_);
  }

  /// Membership in the closure of the domain (for disks and polygons: the solid set).
  bool closure_contains(point z) const {
    if (const auto* d = as<disk>()) return std::abs(z - d->center) <= d->radius;
    if (const auto* p = as<polygon>()) {
      const double tol = 1e-12 * scale();
      if (p->vertices.size() == 2) return geom::segment_distance(z, p->vertices[0], p->vertices[1]) <= tol;
      return geom::point_in_polygon(z, p->vertices) ||
             geom::polygon_boundary_distance(z, p->vertices) <= tol;
    }
    if (const auto* a = as<annulus>()) {
      const double m = std::abs(z);
      return a->r <= m && m <= a->R;
    }
    if (as<grotzsch>()) return std::abs(z) >= 1.0;
    if (as<teichmuller>() || as<plane_minus_slits>()) return true;
    if (const auto* s = as<slit_annulus>()) {
      const double m = std::abs(z);
      return 1.0 <= m && m <= s->R2;
    }
    const auto& c = std::get<complement_of>(kind_);
    return !c.base->contains(z);
  }

  bool bounded() const noexcept {
    if (as<disk>() || as<polygon>() || as<annulus>() || as<slit_annulus>()) return true;
    return false;
  }

  /// Largest distance from the origin of any finite boundary feature.
  double scale() const {
    return std::visit([&](const auto& k) { return scale_impl(k); }, kind_);
  }

  /// Boundary pieces; half-lines are cut at distance `truncate` from the origin.
  std::vector<boundary_piece> boundary(boundary_label label, double truncate) const {
    std::vector<boundary_piece> out;
    append_boundary(out, label, truncate);
    return out;
  }

  void append_boundary(std::vector<boundary_piece>& out, boundary_label label, double truncate) const {
    auto seg = [&](point a, point b) { out.push_back({segment_piece{a, b}, label}); };
    auto circ = [&](point c, double r) { out.push_back({circle_piece{c, r}, label}); };
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, disk>) {
            circ(k.center, k.radius);
          } else if constexpr (std::is_same_v<K, annulus>) {
            circ(0.0, k.r);
            circ(0.0, k.R);
          } else if constexpr (std::is_same_v<K, polygon>) {
            const auto& v = k.vertices;
            if (v.size() == 2) seg(v[0], v[1]);
            else
              for (std::size_t i = 0; i < v.size(); ++i) seg(v[i], v[(i + 1) % v.size()]);
          } else if constexpr (std::is_same_v<K, grotzsch>) {
            circ(0.0, 1.0);
            seg(k.P, std::max(truncate, 2.0 * k.P));
          } else if constexpr (std::is_same_v<K, teichmuller>) {
            seg(-k.rho, 0.0);
            seg(k.P, std::max(truncate, 2.0 * k.P));
          } else if constexpr (std::is_same_v<K, slit_annulus>) {
            circ(0.0, 1.0);
            circ(0.0, k.R2);
            seg(k.P1, k.R2);
          } else if constexpr (std::is_same_v<K, plane_minus_slits>) {
            for (const auto& s : k.slits) seg(s.from, slit_end(s, truncate));
          } else {
            k.base->append_boundary(out, label, truncate);
          }
        },
        kind_);
  }

  static point slit_end(const slit& s, double truncate) {
    if (!s.ray) return s.to;
    const point dir = (s.to - s.from) / std::abs(s.to - s.from);
    // Far enough that the half-line leaves the disk |z| < truncate.
    const double reach = truncate + std::abs(s.from);
    return s.from + reach * dir;
  }

 private:
  void validate() const {
    std::visit([&](const auto& k) { validate_impl(k); }, kind_);
  }

  static void validate_impl(const disk& d) {
    if (!(d.radius > 0.0) || !std::isfinite(d.radius)) throw rejection("disk requires radius > 0");
  }
  static void validate_impl(const annulus& a) {
    if (!(a.r > 0.0 && a.r < a.R && std::isfinite(a.R)))
      throw rejection(a.r == a.R ? "degenerate ring: annulus requires r < R"
                                 : "annulus requires 0 < r < R < inf");
  }
  static void validate_impl(const polygon& p) {
    if (p.vertices.size() == 2) {
      if (p.vertices[0] == p.vertices[1]) throw rejection("degenerate segment");
      return;
    }
    if (!geom::is_simple_polygon(p.vertices))
      throw rejection("polygon must be a simple closed chain with at least 3 vertices");
  }
  static void validate_impl(const grotzsch& g) {
    if (!(g.P > 1.0)) throw rejection("grotzsch requires P > 1");
  }
  static void validate_impl(const teichmuller& t) {
    if (!(t.rho > 0.0 && t.P > 0.0)) throw rejection("teichmuller requires rho > 0 and P > 0");
  }
  static void validate_impl(const slit_annulus& s) {
    if (!(1.0 < s.P1 && s.P1 < s.R2)) throw rejection("slit-annulus requires 1 < P1 < R2");
  }
  static void validate_impl(const plane_minus_slits& p) {
    if (p.slits.empty()) throw rejection("plane-minus-slits requires at least one slit");
    for (const auto& s : p.slits)
      if (s.from == s.to) throw rejection("degenerate slit");
  }
  static void validate_impl(const complement_of& c) {
    if (!c.base) throw rejection("complement-of requires a base domain");
  }

  static bool on_slit(point z, point a, point b) {
    return geom::segment_distance(z, a, b) <= 1e-14 * std::max(std::abs(a), std::abs(b));
  }

  static bool contains_impl(const disk& d, point z) { return std::abs(z - d.center) < d.radius; }
  static bool contains_impl(const annulus& a, point z) {
    const double m = std::abs(z);
    return a.r < m && m < a.R;
  }
  static bool contains_impl(const polygon& p, point z) {
    return p.vertices.size() >= 3 && geom::point_in_polygon(z, p.vertices);
  }
  static bool contains_impl(const grotzsch& g, point z) {
    return std::abs(z) > 1.0 && !(z.imag() == 0.0 && z.real() >= g.P);
  }
  static bool contains_impl(const teichmuller& t, point z) {
    if (z.imag() != 0.0) return true;
    return !((z.real() >= -t.rho && z.real() <= 0.0) || z.real() >= t.P);
  }
  static bool contains_impl(const slit_annulus& s, point z) {
    const double m = std::abs(z);
    return 1.0 < m && m < s.R2 && !(z.imag() == 0.0 && z.real() >= s.P1);
  }
  static bool contains_impl(const plane_minus_slits& p, point z) {
    for (const auto& s : p.slits) {
      const point end = s.ray ? slit_end(s, 2.0 * std::abs(z) + 1.0) : s.to;
      if (on_slit(z, s.from, end)) return false;
    }
    return true;
  }
  static bool contains_impl(const complement_of& c, point z) { return !c.base->closure_contains(z); }

  static double scale_impl(const disk& d) { return std::abs(d.center) + d.radius; }
  static double scale_impl(const annulus& a) { return a.R; }
  static double scale_impl(const polygon& p) {
    double m = 0.0;
    for (auto v : p.vertices) m = std::max(m, std::abs(v));
    return m;
  }
  static double scale_impl(const grotzsch& g) { return g.P; }
  static double scale_impl(const teichmuller& t) { return std::max(t.rho, t.P); }
  static double scale_impl(const slit_annulus& s) { return s.R2; }
  static double scale_impl(const plane_minus_slits& p) {
    double m = 0.0;
    for (const auto& s : p.slits) m = std::max({m, std::abs(s.from), s.ray ? 0.0 : std::abs(s.to)});
    return m;
  }
  static double scale_impl(const complement_of& c) { return c.base->scale(); }

  kind_type kind_;
};

inline domain_spec complement(domain_spec base) {
  return domain_spec(complement_of{std::make_shared<const domain_spec>(std::move(base))});
}

// ---------------------------------------------------------------------------
// Ring domains

/// A doubly connected domain: either a named ring kind (annulus, grotzsch, teichmuller,
/// slit-annulus) or the part of `outer` outside the closure of `inner`.
class ring_domain_spec {
 public:
  static ring_domain_spec named(domain_spec d) {
    if (!d.is_ring_kind()) throw rejection("not a ring: kind '" + d.kind_name() + "' is not a ring domain");
    ring_domain_spec r;
    r.named_ = std::move(d);
    return r;
  }

  static ring_domain_spec between(domain_spec outer, domain_spec inner) {
    const bool outer_ok = outer.as<disk>() || (outer.as<polygon>() && !outer.is_segment()) ||
                          outer.as<plane_minus_slits>();
    if (!outer_ok) throw rejection("ring outer must be a disk, polygon or plane-minus-slits");
    if (!(inner.as<disk>() || inner.as<polygon>()))
      throw rejection("ring inner continuum must be a disk, polygon or segment");
    if (const auto* p = outer.as<plane_minus_slits>()) {
      const bool reaches_infinity =
          std::any_of(p->slits.begin(), p->slits.end(), [](const slit& s) { return s.ray; });
      if (!reaches_infinity) throw rejection("ring outer continuum must contain infinity (needs a ray slit)");
    }
    ring_domain_spec r;
    r.pair_ = {std::move(outer), std::move(inner)};
    r.check_nesting();
    return r;
  }

  bool is_named() const noexcept { return named_.has_value(); }
  const std::optional<domain_spec>& named_kind() const noexcept { return named_; }
  const domain_spec& outer() const { return pair_->first; }
  const domain_spec& inner() const { return pair_->second; }

  bool contains(point z) const {
    if (named_) return named_->contains(z);
    return pair_->first.contains(z) && !pair_->second.closure_contains(z);
  }

  bool outer_bounded() const {
    if (named_) return named_->as<annulus>() || named_->as<slit_annulus>();
    return pair_->first.bounded();
  }

  /// A point of the inner complementary continuum and the radius of a disk about it that
  /// lies in the continuum (zero when the continuum has no interior there).
  std::pair<point, double> inner_anchor() const {
    if (named_) {
      if (const auto* a = named_->as<annulus>()) return {0.0, a->r};
      if (const auto* t = named_->as<teichmuller>()) return {-0.5 * t->rho, 0.0};
      return {0.0, 1.0};  // grotzsch, slit-annulus: the closed unit disk
    }
    const auto& in = pair_->second;
    if (const auto* d = in.as<disk>()) return {d->center, d->radius};
    const auto& v = in.as<polygon>()->vertices;
    if (v.size() == 2) return {0.5 * (v[0] + v[1]), 0.0};
    return polygon_anchor(v);
  }

  /// True when the origin lies in the inner complementary continuum.
  bool separates_origin() const {
    if (named_) return true;
    return pair_->second.closure_contains(0.0);
  }

  /// Largest distance from `about` to a finite boundary feature.
  double feature_radius(point about) const {
    double m = 0.0;
    for (const auto& p : pieces(0.0, true)) {
      if (const auto* s = std::get_if<segment_piece>(&p.shape))
        m = std::max({m, std::abs(s->a - about), std::abs(s->b - about)});
      else {
        const auto& c = std::get<circle_piece>(p.shape);
        m = std::max(m, std::abs(c.center - about) + c.radius);
      }
    }
    return m;
  }

  /// Labeled boundary: inner continuum -> zero, outer -> one. Half-lines end at distance
  /// `truncate` from the origin (with `finite_only` they are reduced to their finite start).
  std::vector<boundary_piece> pieces(double truncate, bool finite_only = false) const {
    std::vector<boundary_piece> out;
    auto seg = [&](point a, point b, boundary_label l) { out.push_back({segment_piece{a, b}, l}); };
    auto circ = [&](point c, double r, boundary_label l) { out.push_back({circle_piece{c, r}, l}); };
    const auto z0 = boundary_label::zero;
    const auto z1 = boundary_label::one;
    auto far = [&](double start) { return finite_only ? start : std::max(truncate, 2.0 * start); };
    if (named_) {
      if (const auto* a = named_->as<annulus>()) {
        circ(0.0, a->r, z0);
        circ(0.0, a->R, z1);
      } else if (const auto* g = named_->as<grotzsch>()) {
        circ(0.0, 1.0, z0);
        if (!finite_only) seg(g->P, far(g->P), z1);
        else seg(g->P, g->P, z1);
      } else if (const auto* t = named_->as<teichmuller>()) {
        seg(-t->rho, 0.0, z0);
        if (!finite_only) seg(t->P, far(t->P), z1);
        else seg(t->P, t->P, z1);
      } else if (const auto* s = named_->as<slit_annulus>()) {
        circ(0.0, 1.0, z0);
        circ(0.0, s->R2, z1);
        seg(s->P1, s->R2, z1);
      }
      return out;
    }
    pair_->second.append_boundary(out, z0, truncate);
    if (finite_only) {
      if (const auto* p = pair_->first.as<plane_minus_slits>()) {
        for (const auto& s : p->slits) seg(s.from, s.ray ? s.from : s.to, z1);
        return out;
      }
    }
    pair_->first.append_boundary(out, z1, truncate);
    return out;
  }

 private:
  ring_domain_spec() = default;

  static std::pair<point, double> polygon_anchor(const std::vector<point>& v) {
    // Best of centroid and edge-midpoint/vertex blends by inscribed radius.
    std::vector<point> cand;
    point c{};
    for (auto p : v) c += p;
    c /= static_cast<double>(v.size());
    cand.push_back(c);
    // Finely sampled curves: pair up a thinned subset of vertices.
    const std::size_t stride = std::max<std::size_t>(1, v.size() / 48);
    for (std::size_t i = 0; i < v.size(); i += stride)
      for (std::size_t j = i + stride; j < v.size(); j += stride) cand.push_back(0.5 * (v[i] + v[j]));
    std::pair<point, double> best{v[0], 0.0};
    for (auto p : cand) {
      if (!geom::point_in_polygon(p, v)) continue;
      const double r = geom::polygon_boundary_distance(p, v);
      if (r > best.second) best = {p, r};
    }
    return best;
  }

  void check_nesting() const {
    const auto& out = pair_->first;
    const auto& in = pair_->second;
    const double span = std::max(out.scale(), in.scale()) + 1.0;
    const auto inner_b = in.boundary(boundary_label::zero, 2.0 * span);
    const auto outer_b = out.boundary(boundary_label::one, 4.0 * span);
    // Sample the inner boundary; every sample must lie inside the outer domain at a
    // positive distance from its boundary.
    double gap = std::numeric_limits<double>::infinity();
    auto dist_outer = [&](point z) {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& p : outer_b) {
        if (const auto* s = std::get_if<segment_piece>(&p.shape)) d = std::min(d, geom::segment_distance(z, s->a, s->b));
        else {
          const auto& c = std::get<circle_piece>(p.shape);
          d = std::min(d, std::abs(std::abs(z - c.center) - c.radius));
        }
      }
      return d;
    };
    const int samples = std::max(3, 512 / static_cast<int>(inner_b.size()));
    for (const auto& p : inner_b) {
      for (int k = 0; k < samples; ++k) {
        point z;
        if (const auto* s = std::get_if<segment_piece>(&p.shape)) z = s->a + (s->b - s->a) * (k / double(samples - 1));
        else {
          const auto& c = std::get<circle_piece>(p.shape);
          z = c.center + c.radius * std::polar(1.0, 2.0 * pi * k / samples);
        }
        if (!out.contains(z)) throw rejection("degenerate ring: inner continuum is not inside the outer domain");
        gap = std::min(gap, dist_outer(z));
      }
    }
    if (!(gap > 1e-9 * span)) throw rejection("degenerate ring: inner continuum touches the outer boundary");
    for (const auto& p : outer_b)
      if (const auto* s = std::get_if<segment_piece>(&p.shape))
        for (const auto& q : inner_b)
          if (const auto* t = std::get_if<segment_piece>(&q.shape))
            if (geom::segments_cross(s->a, s->b, t->a, t->b))
              throw rejection("degenerate ring: inner continuum touches the outer boundary");
  }

  std::optional<domain_spec> named_;
  std::optional<std::pair<domain_spec, domain_spec>> pair_;
};

// ---------------------------------------------------------------------------
// Quadrilaterals

/// Polygon with four marked vertices; sides a, b, c, d run between consecutive marks.
class quadrilateral_spec {
 public:
  quadrilateral_spec(std::vector<point> vertices, std::array<int, 4> marks)
      : vertices_(std::move(vertices)), marks_(marks) {
    if (!geom::is_simple_polygon(vertices_)) throw rejection("quadrilateral boundary must be a simple polygon");
    const int n = static_cast<int>(vertices_.size());
    for (int m : marks_)
      if (m < 0 || m >= n) throw rejection("quadrilateral mark out of range");
    // Cyclic order: walking forward from marks[0] meets marks[1], [2], [3] in turn.
    int prev = 0;
    for (int k = 1; k < 4; ++k) {
      const int off = ((marks_[k] - marks_[0]) % n + n) % n;
      if (off <= prev) throw rejection("quadrilateral marks must be distinct and cyclically ordered");
      prev = off;
    }
  }

  const std::vector<point>& vertices() const noexcept { return vertices_; }
  const std::array<int, 4>& marks() const noexcept { return marks_; }

  /// Vertex chain of side k (0 = a, 1 = b, 2 = c, 3 = d).
  std::vector<point> side(int k) const {
    const int n = static_cast<int>(vertices_.size());
    std::vector<point> out;
    for (int i = marks_[k];; i = (i + 1) % n) {
      out.push_back(vertices_[i]);
      if (i == marks_[(k + 1) % 4]) break;
    }
    return out;
  }

  /// Same quadrilateral with the roles of the side pairs exchanged (b, d become a, c).
  quadrilateral_spec conjugate() const {
    return quadrilateral_spec(vertices_, {marks_[1], marks_[2], marks_[3], marks_[0]});
  }

  double area() const { return std::abs(geom::polygon_signed_area(vertices_)); }

  /// a, c -> zero/one (Dirichlet); b, d -> neumann.
  std::vector<boundary_piece> pieces() const {
    std::vector<boundary_piece> out;
    constexpr std::array labels{boundary_label::zero, boundary_label::neumann, boundary_label::one,
                                boundary_label::neumann};
    for (int k = 0; k < 4; ++k) {
      const auto chain = side(k);
      for (std::size_t i = 0; i + 1 < chain.size(); ++i) out.push_back({segment_piece{chain[i], chain[i + 1]}, labels[k]});
    }
    return out;
  }

  static quadrilateral_spec rectangle(double width, double height) {
    return quadrilateral_spec({{0, 0}, {width, 0}, {width, height}, {0, height}}, {0, 1, 2, 3});
  }

 private:
  std::vector<point> vertices_;
  std::array<int, 4> marks_;
};

// ---------------------------------------------------------------------------
// Sampled curves

class curve_samples {
 public:
  curve_samples(std::vector<point> pts, bool closed) : points_(std::move(pts)), closed_(closed) {
    if (points_.size() < 2) throw rejection("curve needs at least two samples");
    for (std::size_t i = 0; i + 1 < points_.size(); ++i)
      if (points_[i] == points_[i + 1]) throw rejection("curve repeats a sample");
    if (closed_ && points_.front() == points_.back()) points_.pop_back();
  }

  static curve_samples circle(point center, double radius, int n) {
    std::vector<point> pts(n);
    for (int k = 0; k < n; ++k) pts[k] = center + std::polar(radius, 2.0 * pi * k / n);
    return {std::move(pts), true};
  }

  const std::vector<point>& points() const noexcept { return points_; }
  bool closed() const noexcept { return closed_; }
  std::size_t segment_count() const noexcept { return closed_ ? points_.size() : points_.size() - 1; }
  point vertex(std::size_t i) const { return points_[i % points_.size()]; }

  curve_samples scaled(point c) const {
    auto p = points_;
    for (auto& z : p) z *= c;
    return {std::move(p), closed_};
  }

 private:
  std::vector<point> points_;
  bool closed_;
};

/// Length in the metric |dz|/|z|: sum of log-plane chords between consecutive samples.
inline double logarithmic_length(const curve_samples& path) {
  double total = 0.0;
  for (std::size_t i = 0; i < path.segment_count(); ++i) {
    const point a = path.vertex(i);
    const point b = path.vertex(i + 1);
    if (a == 0.0 || b == 0.0 || geom::segment_distance(0.0, a, b) == 0.0)
      throw rejection("logarithmic length: path passes through the origin");
    total += std::abs(std::log(b / a));
  }
  return total;
}

struct curve_radii_result {
  double r1;
  double r2;
  double omega;
};

/// Extreme distances of a closed curve from the origin and its logarithmic oscillation.
inline curve_radii_result curve_radii(const curve_samples& curve) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (auto z : curve.points()) {
    const double m = std::abs(z);
    if (m == 0.0) throw rejection("curve passes through the origin");
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  return {lo, hi, std::log(hi / lo)};
}

// ---------------------------------------------------------------------------
// Logarithmic area: the Euclidean area of the image under log z, i.e. the integral of
// dx dy / |z|^2. For each direction theta the ray from 0 meets the domain in intervals
// (t_k, t_{k+1}); their log-lengths are integrated over theta.

namespace detail {

/// Ray parameters t > 0 where t e^{i theta} meets a piece.
inline void ray_hits(double theta, const boundary_piece& piece, std::vector<double>& out) {
  const point d = std::polar(1.0, theta);
  if (const auto* s = std::get_if<segment_piece>(&piece.shape)) {
    const point e = s->b - s->a;
    const double den = geom::cross(d, e);
    if (den == 0.0) return;  // parallel: a set of measure zero in theta
    const double t = geom::cross(s->a, e) / den;
    const double u = geom::cross(s->a, d) / den;
    if (t > 0.0 && u >= 0.0 && u <= 1.0) out.push_back(t);
    return;
  }
  const auto& c = std::get<circle_piece>(piece.shape);
  const double b = geom::dot(d, c.center);
  const double disc = b * b - (std::norm(c.center) - c.radius * c.radius);
  if (disc < 0.0) return;
  const double q = std::sqrt(disc);
  if (b - q > 0.0) out.push_back(b - q);
  if (b + q > 0.0) out.push_back(b + q);
}

/// Angles where the set of ray hits changes: segment endpoints and circle tangents.
inline std::vector<double> ray_breaks(const std::vector<boundary_piece>& pieces) {
  std::vector<double> br{0.0, 2.0 * pi};
  auto add = [&](double a) {
    a = std::fmod(a, 2.0 * pi);
    if (a < 0.0) a += 2.0 * pi;
    br.push_back(a);
  };
  for (const auto& p : pieces) {
    if (const auto* s = std::get_if<segment_piece>(&p.shape)) {
      if (s->a != 0.0) add(std::arg(s->a));
      if (s->b != 0.0) add(std::arg(s->b));
    } else {
      const auto& c = std::get<circle_piece>(p.shape);
      const double m = std::abs(c.center);
      if (m > c.radius) {
        const double half = std::asin(c.radius / m);
        add(std::arg(c.center) - half);
        add(std::arg(c.center) + half);
      }
    }
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end(), [](double x, double y) { return y - x < 1e-13; }), br.end());
  return br;
}

struct ray_profile {
  double total = 0.0;       // sum of log-lengths of the intervals inside the domain
  double first_exit = 0.0;  // end of the interval starting at the origin, if any
};

template <class Contains>
ray_profile ray_log_profile(double theta, const std::vector<boundary_piece>& pieces, const Contains& contains,
                            double t_lo) {
  std::vector<double> t;
  for (const auto& p : pieces) ray_hits(theta, p, t);
  std::sort(t.begin(), t.end());
  const point d = std::polar(1.0, theta);
  ray_profile out;
  double prev = t_lo;
  for (std::size_t k = 0; k <= t.size(); ++k) {
    if (k < t.size() && t[k] <= prev) continue;
    if (k == t.size()) break;  // the last interval reaches infinity and lies outside
    const double mid = prev > 0.0 ? std::sqrt(prev * t[k]) : 0.5 * t[k];
    if (contains(mid * d)) {
      if (prev > 0.0) out.total += std::log(t[k] / prev);
      else out.first_exit = t[k];
    }
    prev = t[k];
  }
  return out;
}

template <class F>
double integrate_angles(const std::vector<double>& breaks, F&& f) {
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    if (breaks[k + 1] - breaks[k] < 1e-14) continue;
    total += gauss_kronrod<double, 31>::integrate(f, breaks[k], breaks[k + 1], 12, 1e-11);
  }
  return total;
}

}  // namespace detail

/// Logarithmic area of a ring domain not containing the origin. Unbounded rings need a
/// finite `truncate` radius; the part with |z| >= truncate is discarded.
inline double logarithmic_area(const ring_domain_spec& ring,
                               double truncate = std::numeric_limits<double>::infinity()) {
  if (ring.contains(0.0)) throw rejection("logarithmic area: the domain contains the origin");
  const bool cut = std::isfinite(truncate);
  if (!ring.outer_bounded() && !cut) throw rejection("logarithmic area of an unbounded ring is infinite; give a truncation radius");
  auto pieces = ring.pieces(cut ? truncate : 0.0);
  if (cut) pieces.push_back({circle_piece{0.0, truncate}, boundary_label::one});
  auto contains = [&](point z) { return (!cut || std::abs(z) < truncate) && ring.contains(z); };
  const auto breaks = detail::ray_breaks(pieces);
  return detail::integrate_angles(breaks, [&](double th) {
    const auto prof = detail::ray_log_profile(th, pieces, contains, 0.0);
    if (prof.first_exit > 0.0) throw rejection("logarithmic area: the domain contains the origin");
    return prof.total;
  });
}

/// Reduced logarithmic area at 0 of a bounded simply-connected domain containing 0:
/// lim (F_rho + 2 pi log rho), the area outside |z| = rho taken in the log metric.
inline double reduced_logarithmic_area(const domain_spec& domain) {
  if (!domain.bounded() || domain.is_ring_kind() || domain.is_segment())
    throw rejection("reduced logarithmic area needs a bounded simply-connected domain");
  if (!domain.contains(0.0)) throw rejection("reduced logarithmic area: the domain must contain the origin");
  const auto pieces = domain.boundary(boundary_label::one, 0.0);
  auto contains = [&](point z) { return domain.contains(z); };
  const auto breaks = detail::ray_breaks(pieces);
  return detail::integrate_angles(breaks, [&](double th) {
    const auto prof = detail::ray_log_profile(th, pieces, contains, 0.0);
    return std::log(prof.first_exit) + prof.total;
  });
}

}  // namespace ringmod
