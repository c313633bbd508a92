#pragma once

// Near-additivity of modules forces circularity: for disjoint domains about 0 and about
// infinity, or disjoint subrings of a round annulus, compare the deficit delta with the
// thinnest circular ring that contains the set between them.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ringmod/errors.hpp"
#include "ringmod/geometry.hpp"
#include "ringmod/invariants.hpp"
#include "ringmod/modsolver.hpp"
#include "ringmod/report.hpp"

namespace ringmod {

struct modulsatz_options {
  int resolution = 128;
  modulus_options modulus;
  int boundary_samples = 512;
};

namespace detail {

/// Boundary samples of a disk or polygon.
inline std::vector<point> boundary_samples(const domain_spec& d, int n) {
  std::vector<point> out;
  if (const auto* c = d.as<disk>()) {
    for (int k = 0; k < n; ++k) out.push_back(c->center + std::polar(c->radius, 2.0 * pi * k / n));
    return out;
  }
  if (const auto* p = d.as<polygon>()) {
    const auto& v = p->vertices;
    const int per = std::max(1, n / static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
      for (int q = 0; q < per; ++q) out.push_back(v[i] + (v[(i + 1) % v.size()] - v[i]) * (double(q) / per));
    return out;
  }
  throw rejection("modulsatz: expected a disk or polygon");
}

/// Smallest and largest |z| over the boundary of a disk or polygon.
inline std::pair<double, double> boundary_radii(const domain_spec& d) {
  if (const auto* c = d.as<disk>()) {
    const double m = std::abs(c->center);
    return {std::abs(c->radius - m), c->radius + m};
  }
  if (const auto* p = d.as<polygon>()) {
    double hi = 0.0;
    for (auto z : p->vertices) hi = std::max(hi, std::abs(z));
    return {geom::polygon_boundary_distance(0.0, p->vertices), hi};
  }
  throw rejection("modulsatz: expected a disk or polygon");
}

/// The continuum bounded by a disk or polygon, or the named annulus pieces.
inline const domain_spec& base_of(const domain_spec& d) {
  if (const auto* c = d.as<complement_of>()) return *c->base;
  return d;
}

struct circle {
  point c;
  double r;
};

inline bool covers(const circle& k, point p) { return std::abs(p - k.c) <= k.r * (1.0 + 1e-12) + 1e-15; }

inline circle circle_two(point a, point b) { return {0.5 * (a + b), 0.5 * std::abs(a - b)}; }

inline circle circle_three(point a, point b, point c) {
  const double d = 2.0 * (a.real() * (b.imag() - c.imag()) + b.real() * (c.imag() - a.imag()) + c.real() * (a.imag() - b.imag()));
  if (d == 0.0) {
    auto k = circle_two(a, b);
    for (auto kk : {circle_two(a, c), circle_two(b, c)})
      if (kk.r > k.r) k = kk;
    return k;
  }
  const double A = std::norm(a), B = std::norm(b), C = std::norm(c);
  const point o((A * (b.imag() - c.imag()) + B * (c.imag() - a.imag()) + C * (a.imag() - b.imag())) / d,
                (A * (c.real() - b.real()) + B * (a.real() - c.real()) + C * (b.real() - a.real())) / d);
  return {o, std::abs(a - o)};
}

}  // namespace detail

/// Smallest circle containing the points (incremental construction over a fixed shuffle).
inline detail::circle min_enclosing_circle(std::vector<point> pts) {
  if (pts.empty()) throw rejection("enclosing circle: no points");
  std::mt19937_64 g(12345);
  std::shuffle(pts.begin(), pts.end(), g);
  detail::circle k{pts[0], 0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (detail::covers(k, pts[i])) continue;
    k = {pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (detail::covers(k, pts[j])) continue;
      k = detail::circle_two(pts[i], pts[j]);
      for (std::size_t l = 0; l < j; ++l)
        if (!detail::covers(k, pts[l])) k = detail::circle_three(pts[i], pts[j], pts[l]);
    }
  }
  return k;
}

/// g1 contains 0, g2 = complement of a disk or polygon contains infinity, g1 inside its base.
inline report verify_special_modulsatz(const domain_spec& g1, const domain_spec& g2, const modulsatz_options& opt = {}) {
  if (!g1.contains(0.0)) throw rejection("modulsatz: g1 must contain 0");
  if (!g2.as<complement_of>()) throw rejection("modulsatz: g2 must be the complement of a disk or polygon");
  const domain_spec& base = detail::base_of(g2);
  for (auto z : detail::boundary_samples(g1, opt.boundary_samples))
    if (!base.closure_contains(z)) throw rejection("modulsatz: overlapping domains");
  const auto m1 = reduced_modulus(g1, point(0.0), opt.resolution, opt.modulus);
  const auto m2 = reduced_modulus(g2, std::nullopt, opt.resolution, opt.modulus);
  const double delta = -(m1.module.value + m2.module.value);
  const double err = m1.module.error_estimate + m2.module.error_estimate;
  // The set between the domains lies in r_in <= |z| <= r_out.
  const double r_in = detail::boundary_radii(g1).first;
  const double r_out = detail::boundary_radii(base).second;
  const double eps = std::max({0.0, m1.module.value - std::log(r_in), std::log(r_out) + m2.module.value});
  report rep;
  rep.name = "special modulsatz";
  rep.columns = {"M1", "M2", "delta", "epsilon", "error"};
  rep.add_row({m1.module.value, m2.module.value, delta, eps, err});
  rep.note("M1", m1.module.value);
  rep.note("M2", m2.module.value);
  rep.note("delta", delta);
  rep.note("epsilon", eps);
  rep.note("error", err);
  rep.note("inner_radius", r_in);
  rep.note("outer_radius", r_out);
  const bool ok = delta >= -err;
  if (!ok) rep.violations = 1;
  rep.note("verdict", ok ? "delta nonnegative" : "delta negative beyond error");
  return rep;
}

/// Disjoint subrings g1 (next to the inner circle) and g2 of annulus(r, R).
inline report verify_modulsatz(const ring_domain_spec& ring, const ring_domain_spec& g1, const ring_domain_spec& g2,
                               const modulsatz_options& opt = {}) {
  const auto* ann = ring.is_named() ? ring.named_kind()->as<annulus>() : nullptr;
  if (!ann) throw rejection("modulsatz: the ambient ring must be a round annulus");
  auto parts = [](const ring_domain_spec& s) -> std::pair<domain_spec, domain_spec> {
    if (s.is_named()) {
      const auto* a = s.named_kind()->as<annulus>();
      if (!a) throw rejection("modulsatz: subrings must be annuli or lie between disks or polygons");
      return {domain_spec(disk{0.0, a->R}), domain_spec(disk{0.0, a->r})};
    }
    return {s.outer(), s.inner()};
  };
  const auto [out1, in1] = parts(g1);
  const auto [out2, in2] = parts(g2);
  const int n = opt.boundary_samples;
  // Each subring must separate the boundary circles, and g1 must lie inside g2's inner continuum.
  for (int k = 0; k < n; ++k) {
    const point z = std::polar(ann->r, 2.0 * pi * k / n);
    if (!in1.closure_contains(z) || !in2.closure_contains(z)) throw rejection("modulsatz: subring does not separate the annulus");
  }
  for (const auto& d : {out1, out2})
    for (auto z : detail::boundary_samples(d, n))
      if (std::abs(z) > ann->R * (1.0 + 1e-12)) throw rejection("modulsatz: subring leaves the annulus");
  for (auto z : detail::boundary_samples(out1, n))
    if (!in2.closure_contains(z)) throw rejection("modulsatz: subrings overlap or are out of order");
  const auto m1 = ring_modulus(g1, opt.resolution, opt.modulus);
  const auto m2 = ring_modulus(g2, opt.resolution, opt.modulus);
  const double total = std::log(ann->R / ann->r);
  const double delta = total - m1.value - m2.value;
  const double err = m1.error_estimate + m2.error_estimate;
  const double lo = detail::boundary_radii(out1).first, hi = detail::boundary_radii(in2).second;
  const double eps = std::max({0.0, std::log(ann->r) + m1.value - std::log(lo), std::log(hi) - std::log(ann->R) + m2.value});
  report rep;
  rep.name = "modulsatz";
  rep.columns = {"M1", "M2", "log_R_over_r", "delta", "epsilon", "error"};
  rep.add_row({m1.value, m2.value, total, delta, eps, err});
  rep.note("M1", m1.value);
  rep.note("M2", m2.value);
  rep.note("log_R_over_r", total);
  rep.note("delta", delta);
  rep.note("epsilon", eps);
  rep.note("error", err);
  const bool ok = delta >= -err;
  if (!ok) rep.violations = 1;
  rep.note("verdict", ok ? "delta nonnegative" : "delta negative beyond error");
  return rep;
}

/// g1(t) = image of the unit disk under z + t z^2 (reduced module 0 at the origin), g2(t) =
/// exterior of its smallest enclosing circle enlarged by 1 + t^2.
inline report bump_family_probe(const std::vector<double>& ts, const modulsatz_options& opt = {}) {
  report rep;
  rep.name = "bump family";
  rep.columns = {"t", "M1", "M2", "delta", "epsilon", "scale", "ratio", "error"};
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  std::vector<std::pair<double, double>> de;
  bool nonneg = true;
  for (double t : ts) {
    if (!(t >= 0.0 && t < 0.5)) throw rejection("bump family: t must lie in [0, 1/2)");
    std::vector<point> curve(opt.boundary_samples);
    for (int k = 0; k < opt.boundary_samples; ++k) {
      const point z = std::polar(1.0, 2.0 * pi * k / opt.boundary_samples);
      curve[k] = z + t * z * z;
    }
    const auto cr = curve_radii(curve_samples(curve, true));
    const double eps = cr.omega;
    const auto k = min_enclosing_circle(curve);
    const domain_spec outer = complement(domain_spec(disk{k.c, k.r * (1.0 + t * t)}));
    const auto m2 = reduced_modulus(outer, std::nullopt, opt.resolution, opt.modulus);
    const double M1 = 0.0;
    const double delta = -(M1 + m2.module.value);
    const double err = m2.module.error_estimate;
    const double scale = eps > 0.0 ? eps * eps / std::log(1.0 / eps) : 0.0;
    const double ratio = scale > 0.0 ? delta / scale : std::nan("");
    rep.add_row({t, M1, m2.module.value, delta, eps, scale, ratio, err});
    if (delta < -err) nonneg = false;
    if (std::isfinite(ratio)) {
      rmin = std::min(rmin, ratio);
      rmax = std::max(rmax, ratio);
    }
    de.emplace_back(delta, eps);
  }
  // epsilon should shrink with delta along the family
  std::sort(de.begin(), de.end());
  bool monotone = true;
  for (std::size_t i = 1; i < de.size(); ++i)
    if (de[i].second < de[i - 1].second) monotone = false;
  const bool bounded = rmin > 0.0 && rmax / rmin <= 10.0;
  rep.note("delta_nonnegative", nonneg ? "yes" : "no");
  rep.note("epsilon_follows_delta", monotone ? "yes" : "no");
  rep.note("ratio_min", rmin);
  rep.note("ratio_max", rmax);
  rep.note("ratio_spread", rmin > 0.0 ? rmax / rmin : std::nan(""));
  rep.note("ratio_within_decade", bounded ? "yes" : "no");
  if (!nonneg || !monotone) rep.violations = 1;
  if (!bounded && ts.size() > 1) rep.failed = true;
  return rep;
}

/// Random disjoint pairs about 0 and about infinity, both omitting -1: the reduced moduli
/// satisfy M1 + M2 <= 0 and each is at most log 4.
inline report region_b_sampler(int trials, std::uint64_t seed, const suite_options& opt = {}) {
  const double cap = std::log(4.0);
  return detail::run_suite("region_b", {"M1", "M2"}, trials, seed, opt, [&](std::mt19937_64& g, int t) {
    using namespace detail;
    trial_outcome o;
    if (t % 10 == 0) {
      // Unit disk and its exterior: the point (0, 0).
      const auto a = reduced_modulus(domain_spec(disk{0.0, 1.0}), point(0.0), opt.resolution, opt.modulus);
      const auto b = reduced_modulus(complement(domain_spec(disk{0.0, 1.0})), std::nullopt, opt.resolution, opt.modulus);
      o.values = {a.module.value, b.module.value};
      o.margin = std::min({-(a.module.value + b.module.value), cap - a.module.value, cap - b.module.value});
      o.error = a.module.error_estimate + b.module.error_estimate;
      o.equality = true;
      return o;
    }
    if (t % 10 == 5) {
      // The plane cut along (-inf, -1] about 0: M1 reaches log 4 and no partner fits.
      const auto a = reduced_modulus(domain_spec(plane_minus_slits{{slit{-1.0, -2.0, true}}}), point(0.0),
                                     opt.resolution, opt.modulus);
      o.values = {a.module.value, std::nan("")};
      o.margin = cap - a.module.value;
      o.error = a.module.error_estimate;
      o.equality = true;
      return o;
    }
    // Inner domain about 0 avoiding -1; outer domain is the exterior of a curve around it,
    // with -1 on or inside that curve.
    const double r = uniform(g, 0.3, 0.95);
    const point c = std::polar(uniform(g, 0.0, 0.5) * r, uniform(g, 0.0, 2.0 * pi));
    std::optional<domain_spec> inner;
    std::vector<point> in_poly;
    if (t % 2) inner = domain_spec(disk{c, r});
    else {
      in_poly = star_polygon(c, r, random_profile(g, 0.2));
      inner = domain_spec(polygon{in_poly});
    }
    if (!inner->contains(0.0) || inner->closure_contains(-1.0)) throw rejection("inner domain must contain 0 and omit -1");
    const auto [lo, hi] = boundary_radii(*inner);
    (void)lo;
    const double R = std::max(hi * uniform(g, 1.05, 2.0), 1.0 + 1e-3);
    const point c2 = std::polar(uniform(g, 0.0, 0.3) * (R - hi), uniform(g, 0.0, 2.0 * pi));
    const domain_spec base(disk{c2, R + std::abs(c2)});
    if (!base.closure_contains(-1.0)) throw rejection("outer domain must omit -1");
    const auto a = reduced_modulus(*inner, point(0.0), opt.resolution, opt.modulus);
    const auto b = reduced_modulus(complement(base), std::nullopt, opt.resolution, opt.modulus);
    o.values = {a.module.value, b.module.value};
    o.margin = std::min({-(a.module.value + b.module.value), cap - a.module.value, cap - b.module.value});
    o.error = a.module.error_estimate + b.module.error_estimate;
    return o;
  });
}

}  // namespace ringmod
