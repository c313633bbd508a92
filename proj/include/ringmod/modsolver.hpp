#pragma once

// Conformal invariants from discrete Dirichlet energies: ring modules, quadrilateral
// modules and reduced modules.
//
// A level is the mean over a few lattice offsets of the module computed on one lattice;
// averaging over offsets removes the dependence on where slit tips and corners fall
// inside a cell, leaving an error that behaves like C h. Levels at N, N/2 (and N/4 for
// the observed order) are combined by Richardson extrapolation; unbounded domains add
// a second truncation radius.

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <vector>

#include "ringmod/errors.hpp"
#include "ringmod/geometry.hpp"
#include "ringmod/grid.hpp"
#include "ringmod/solver.hpp"

namespace ringmod {

struct modulus_options {
  bool extrapolate = true;
  int phases = 4;  ///< lattice offsets averaged per level
  int jobs = 1;    ///< concurrent solves
  solver_options solver;
};

struct modulus_result {
  double value = 0.0;
  double error_estimate = 0.0;
  int resolution = 0;
  double energy = 0.0;  ///< Dirichlet energy at the finest level (offset mean)
  bool extrapolated = false;
  double observed_order = std::numeric_limits<double>::quiet_NaN();
  double raw_value = 0.0;               ///< finest level before extrapolation
  double truncation_correction = 0.0;   ///< added for the truncated far field
  int solves = 0;
};

namespace detail {

inline point phase_shift(int k, int phases) {
  const double golden = 0.6180339887498949;
  const double v = std::fmod(k * golden, 1.0);
  return {static_cast<double>(k) / phases, v};
}

struct level {
  double value = 0.0;   // mean module
  double energy = 0.0;  // mean energy
  double spread = 0.0;  // max - min over offsets
  int solves = 0;
};

inline void require_ring_grid(const labeled_grid& g) {
  bool w0 = false, w1 = false;
  for (std::size_t k = 0; k < g.links().size(); ++k) {
    if (!g.interior()[k]) continue;
    for (const auto& l : g.links()[k]) {
      w0 = w0 || l.w0 > 0.0;
      w1 = w1 || l.w1 > 0.0;
    }
  }
  if (!w0 || !w1) throw rejection("not a ring: the discrete domain does not touch both boundary components");
}

inline double module_of(problem_kind kind, double energy) {
  if (!(energy > 0.0)) throw diagnostic("discrete energy vanished");
  return kind == problem_kind::ring ? 2.0 * pi / energy : 1.0 / energy;
}

inline level evaluate_level(const region& base, int resolution, double truncation_scale,
                            const modulus_options& opt) {
  const int phases = std::max(1, opt.phases);
  std::vector<double> energies(phases);
  auto run = [&](int k) {
    const auto reg = base.rebuild(phase_shift(k, phases), truncation_scale);
    const auto g = rasterize_region(reg, resolution);
    if (reg->kind == problem_kind::ring) require_ring_grid(g);
    return solve_harmonic(g, opt.solver).energy;
  };
  if (opt.jobs > 1 && phases > 1) {
    std::vector<std::future<double>> pending;
    for (int k = 0; k < phases; ++k) pending.push_back(std::async(std::launch::async, run, k));
    for (int k = 0; k < phases; ++k) energies[k] = pending[k].get();
  } else {
    for (int k = 0; k < phases; ++k) energies[k] = run(k);
  }
  level lv;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double e : energies) {
    const double m = module_of(base.kind, e);
    lv.value += m / phases;
    lv.energy += e / phases;
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  lv.spread = hi - lo;
  lv.solves = phases;
  return lv;
}

inline modulus_result extrapolated_modulus(const region& reg, int resolution, const modulus_options& opt) {
  if (!reg.rebuild) throw rejection("grid has no source description to refine");
  if (resolution < 32) throw rejection("extrapolation needs resolution of at least 32");
  modulus_result out;
  out.resolution = resolution;
  out.extrapolated = true;
  const level fine = evaluate_level(reg, resolution, 1.0, opt);
  const level coarse = evaluate_level(reg, resolution / 2, 1.0, opt);
  out.solves = fine.solves + coarse.solves;
  out.raw_value = fine.value;
  out.energy = fine.energy;
  const double dh = fine.value - coarse.value;
  out.value = fine.value + dh;
  // |dh| is the first-order error; half the coarser step guards against a lucky small dh.
  double step = std::abs(dh);
  if (resolution / 4 >= 16) {
    const level coarsest = evaluate_level(reg, resolution / 4, 1.0, opt);
    out.solves += coarsest.solves;
    const double d2 = coarse.value - coarsest.value;
    if (dh != 0.0 && d2 != 0.0) out.observed_order = std::log2(std::abs(d2 / dh));
    step = std::max(step, 0.5 * std::abs(d2));
  }
  double dt = 0.0;
  if (reg.truncation > 0.0) {
    // Far-field error decays like 1/T: M = M(T) + 2 (M(2T) - M(T)).
    const level wide = evaluate_level(reg, resolution / 2, 2.0, opt);
    out.solves += wide.solves;
    dt = wide.value - coarse.value;
    out.truncation_correction = 2.0 * dt;
    out.value += out.truncation_correction;
  }
  const double floor = 1e-12 * std::max(1.0, std::abs(out.value));
  // Offset scatter enters the extrapolant twice from the fine level and once from the coarse.
  const double scatter = (2.0 * fine.spread + coarse.spread) / (2.0 * std::sqrt(double(std::max(1, opt.phases))));
  out.error_estimate = std::max(step + std::abs(dt) + scatter, floor);
  return out;
}

inline modulus_result single_modulus(const labeled_grid& g, const modulus_options& opt) {
  modulus_result out;
  out.resolution = g.resolution();
  const auto sol = solve_harmonic(g, opt.solver);
  out.energy = sol.energy;
  out.value = module_of(g.kind(), sol.energy);
  out.raw_value = out.value;
  out.solves = 1;
  // First-order error: the difference to the half-resolution lattice.
  double err = 0.0;
  if (g.source() && g.source()->rebuild && g.resolution() / 2 >= 16) {
    const auto coarse = rasterize_region(g.source(), g.resolution() / 2);
    err = std::abs(out.value - module_of(g.kind(), solve_harmonic(coarse, opt.solver).energy));
    out.solves = 2;
  }
  out.error_estimate = std::max(err, 1e-12 * std::max(1.0, std::abs(out.value)));
  return out;
}

}  // namespace detail

/// Module log(R/r) of the ring carried by `grid`.
inline modulus_result ring_modulus(const labeled_grid& grid, const modulus_options& opt = {}) {
  if (grid.kind() != problem_kind::ring) throw rejection("ring_modulus needs a ring grid");
  detail::require_ring_grid(grid);
  if (!opt.extrapolate) return detail::single_modulus(grid, opt);
  return detail::extrapolated_modulus(*grid.source(), grid.resolution(), opt);
}

inline modulus_result ring_modulus(const ring_domain_spec& ring, int resolution, const modulus_options& opt = {},
                                   const ring_options& ropt = {}) {
  return ring_modulus(rasterize(ring, resolution, ropt), opt);
}

/// Extremal distance between sides a and c of the quadrilateral carried by `grid`.
inline modulus_result quad_modulus(const labeled_grid& grid, const modulus_options& opt = {}) {
  if (grid.kind() != problem_kind::quad) throw rejection("quad_modulus needs a quadrilateral grid");
  if (!opt.extrapolate) return detail::single_modulus(grid, opt);
  return detail::extrapolated_modulus(*grid.source(), grid.resolution(), opt);
}

inline modulus_result quad_modulus(const quadrilateral_spec& q, int resolution, const modulus_options& opt = {}) {
  return quad_modulus(rasterize(q, resolution), opt);
}

// ---------------------------------------------------------------------------
// Reduced module

struct reduced_result {
  modulus_result module;        ///< value: the reduced module
  std::vector<double> rho;      ///< ladder radii (in the plane, or 1/z-plane for infinity)
  std::vector<double> rung;     ///< M_rho + log rho per radius
  double boundary_distance = 0.0;
  double bound = 0.0;           ///< 2 rho / (R - 4 rho) at the smallest rung
};

namespace detail {

inline double piece_distance(point z, const boundary_piece& p) {
  if (const auto* s = std::get_if<segment_piece>(&p.shape)) return geom::segment_distance(z, s->a, s->b);
  const auto& c = std::get<circle_piece>(p.shape);
  return std::abs(std::abs(z - c.center) - c.radius);
}

inline double piece_reach(point z, const boundary_piece& p) {
  if (const auto* s = std::get_if<segment_piece>(&p.shape)) return std::max(std::abs(s->a - z), std::abs(s->b - z));
  const auto& c = std::get<circle_piece>(p.shape);
  return std::abs(z - c.center) + c.radius;
}

struct reduced_setup {
  domain_spec domain;
  bool at_infinity = false;
  point at{};                 // marked point, or the centre of the bounded complement
  std::vector<boundary_piece> finite;  // domain boundary with half-lines cut short
  bool unbounded = false;     // finite marked point in an unbounded domain
  double feature = 0.0;       // largest distance from `at` to a finite boundary feature
  double truncation_factor = 50.0;
};

/// Ring between the domain boundary (label 1) and a small circle about the marked point
/// (label 0). For the point at infinity the small circle becomes |z - at| = 1/rho.
inline std::shared_ptr<const region> reduced_region(const reduced_setup& s, double rho, point shift, double tscale) {
  auto reg = std::make_shared<region>();
  reg->kind = problem_kind::ring;
  reg->log_polar = true;
  reg->shift = shift;
  reg->center = s.at;
  if (!s.at_infinity) {
    const double radius = rho;
    reg->r_min = 0.5 * radius;
    double trunc = 0.0;
    if (s.unbounded) {
      trunc = s.truncation_factor * tscale * s.feature;
      reg->r_max = trunc;
    } else {
      reg->r_max = s.feature;
    }
    reg->truncation = trunc;
    const double reach = trunc + std::abs(s.at) + s.feature;
    reg->pieces = s.domain.boundary(boundary_label::one, reach);
    reg->pieces.push_back({circle_piece{s.at, radius}, boundary_label::zero});
    if (trunc > 0.0) reg->pieces.push_back({circle_piece{s.at, trunc}, boundary_label::one});
    reg->contains = [dom = s.domain, c = s.at, radius, trunc](point z) {
      const double d = std::abs(z - c);
      if (d <= radius) return false;
      if (trunc > 0.0 && d >= trunc) return false;
      return dom.contains(z);
    };
  } else {
    const double big = 1.0 / rho;
    const auto& base = *s.domain.as<complement_of>()->base;
    double inner_r = 0.0;
    if (const auto* d = base.as<disk>()) inner_r = d->radius;
    reg->r_min = inner_r > 0.0 ? 0.5 * inner_r : 1e-3 * s.feature;
    reg->r_max = big;
    reg->pieces = base.boundary(boundary_label::one, 0.0);
    reg->pieces.push_back({circle_piece{s.at, big}, boundary_label::zero});
    if (inner_r == 0.0) reg->pieces.push_back({circle_piece{s.at, reg->r_min}, boundary_label::one});
    reg->contains = [dom = s.domain, c = s.at, big, rmin = reg->r_min](point z) {
      const double d = std::abs(z - c);
      return d > rmin && d < big && dom.contains(z);
    };
  }
  reg->rebuild = [s, rho](point sh, double ts) { return reduced_region(s, rho, sh, ts); };
  return reg;
}

inline reduced_setup prepare_reduced(const domain_spec& domain, std::optional<point> at) {
  if (domain.is_ring_kind()) throw rejection("reduced module needs a simply-connected domain, got " + domain.kind_name());
  if (domain.is_segment()) throw rejection("a segment is not a domain");
  reduced_setup s{domain};
  if (!at) {
    const auto* c = domain.as<complement_of>();
    if (!c) throw rejection("point at infinity is not in the domain");
    const auto& base = *c->base;
    if (!(base.as<disk>() || base.as<polygon>()))
      throw rejection("point at infinity: the complement must be a disk, polygon or segment");
    s.at_infinity = true;
    if (const auto* d = base.as<disk>()) s.at = d->center;
    else {
      const auto& v = base.as<polygon>()->vertices;
      point m{};
      for (auto p : v) m += p;
      s.at = m / static_cast<double>(v.size());
      if (v.size() > 2 && !geom::point_in_polygon(s.at, v)) s.at = 0.5 * (v[0] + v[v.size() / 2]);
    }
    s.finite = base.boundary(boundary_label::one, 0.0);
    for (const auto& p : s.finite) s.feature = std::max(s.feature, piece_reach(s.at, p));
    return s;
  }
  if (domain.as<complement_of>()) {
    // A finite point of an exterior domain: treat the complement's boundary as the only boundary.
    if (!domain.contains(*at)) throw rejection("marked point lies outside the domain");
    throw rejection("finite marked point in an exterior domain is not simply connected in the plane");
  }
  if (const auto* p = domain.as<plane_minus_slits>()) {
    const bool ray = std::any_of(p->slits.begin(), p->slits.end(), [](const slit& x) { return x.ray; });
    if (!ray || p->slits.size() != 1) throw rejection("reduced module: plane-minus-slits must be a single ray");
  }
  if (!domain.contains(*at)) throw rejection("marked point lies outside the domain");
  s.at = *at;
  s.unbounded = !domain.bounded();
  const double span = domain.scale() + std::abs(*at) + 1.0;
  s.finite = domain.boundary(boundary_label::one, 4.0 * span);
  for (const auto& pc : domain.boundary(boundary_label::one, 0.0)) {
    if (const auto* sg = std::get_if<segment_piece>(&pc.shape); sg && s.unbounded)
      s.feature = std::max(s.feature, std::abs(sg->a - s.at));
    else
      s.feature = std::max(s.feature, piece_reach(s.at, pc));
  }
  return s;
}

}  // namespace detail

/// Reduced module lim (M_rho + log rho) at `at`; std::nullopt marks the point at infinity,
/// handled through z -> 1/z (a circle of radius 1/rho about a point of the complement).
inline reduced_result reduced_modulus(const domain_spec& domain, std::optional<point> at, int resolution,
                                      const modulus_options& opt = {}, double truncation_factor = 50.0) {
  auto s = detail::prepare_reduced(domain, at);
  s.truncation_factor = truncation_factor;
  reduced_result out;
  // Distance from the marked point to the boundary (in the 1/z plane for infinity).
  double d = std::numeric_limits<double>::infinity();
  if (s.at_infinity) {
    d = 1.0 / s.feature;
  } else {
    for (const auto& p : s.finite) d = std::min(d, detail::piece_distance(s.at, p));
  }
  if (!(d > 0.0)) throw rejection("marked point lies on the boundary");
  out.boundary_distance = d;
  double err = 0.0;
  int solves = 0;
  modulus_result finest;
  for (double div : {8.0, 16.0, 32.0}) {
    const double rho = d / div;
    const auto reg = detail::reduced_region(s, rho, {}, 1.0);
    const auto g = rasterize_region(reg, resolution);
    const auto m = ring_modulus(g, opt);
    out.rho.push_back(rho);
    out.rung.push_back(m.value + std::log(rho));
    err = std::max(err, m.error_estimate);
    solves += m.solves;
    finest = m;
  }
  // Least-squares line in rho; its intercept is the limit.
  const double n = 3.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < 3; ++k) {
    sx += out.rho[k];
    sy += out.rung[k];
    sxx += out.rho[k] * out.rho[k];
    sxy += out.rho[k] * out.rung[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  // The rungs must approach the limit monotonically unless they already agree within error.
  const double d1 = out.rung[1] - out.rung[0], d2 = out.rung[2] - out.rung[1];
  if (d1 * d2 < 0.0 && std::min(std::abs(d1), std::abs(d2)) > 4.0 * err + 1e-9)
    throw diagnostic("extrapolation unreliable: reduced-module ladder is not monotone", std::abs(d1 - d2));
  out.module = finest;
  out.module.value = intercept;
  out.module.raw_value = out.rung.back();
  out.module.solves = solves;
  const double R = std::exp(intercept);
  const double rmin = out.rho.back();
  out.bound = R > 4.0 * rmin ? 2.0 * rmin / (R - 4.0 * rmin) : std::numeric_limits<double>::infinity();
  out.module.error_estimate = out.bound + err;
  return out;
}

inline double conformal_radius(const domain_spec& domain, std::optional<point> at, int resolution,
                               const modulus_options& opt = {}) {
  return std::exp(reduced_modulus(domain, at, resolution, opt).module.value);
}

}  // namespace ringmod
