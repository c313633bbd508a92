#pragma once

// Seeded property suites for the module inequalities and extremal problems. Each trial
// draws a configuration, computes both sides, and records the margin (positive when the
// inequality holds). A trial is a violation only when the margin is below minus the
// combined error estimates of its operands and the suite tolerance.

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <random>
#include <string>
#include <vector>

#include "ringmod/elliptic.hpp"
#include "ringmod/errors.hpp"
#include "ringmod/geometry.hpp"
#include "ringmod/modsolver.hpp"
#include "ringmod/report.hpp"

namespace ringmod {

struct suite_options {
  int resolution = 64;
  double tolerance = 1e-6;
  int jobs = 1;             // trials run concurrently
  modulus_options modulus = cheap_modulus();

  static modulus_options cheap_modulus() {
    modulus_options m;
    m.phases = 2;
    m.solver.tolerance = 1e-9;
    return m;
  }
};

struct trial_outcome {
  std::vector<double> values;  // one per suite column
  double margin = 0.0;
  double error = 0.0;
  bool skipped = false;
  bool equality = false;       // configuration where the inequality is an equality
};

namespace detail {

/// Independent stream per trial so concurrent runs stay reproducible.
inline std::mt19937_64 trial_rng(std::uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), 0x5eedu};
  return std::mt19937_64(seq);
}

inline double uniform(std::mt19937_64& g, double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); }

/// Radial profile 1 + sum_{k<=3} (a_k cos k t + b_k sin k t) with sum |a_k| + |b_k| <= amp.
struct star_profile {
  double a[3], b[3];
  double operator()(double t) const {
    double v = 1.0;
    for (int k = 0; k < 3; ++k) v += a[k] * std::cos((k + 1) * t) + b[k] * std::sin((k + 1) * t);
    return v;
  }
};

inline star_profile random_profile(std::mt19937_64& g, double amp) {
  star_profile p{};
  double w[6], total = 0.0;
  for (double& x : w) total += (x = uniform(g, -1.0, 1.0), std::abs(x));
  const double scale = uniform(g, 0.0, amp) / std::max(total, 1e-12);
  for (int k = 0; k < 3; ++k) {
    p.a[k] = w[2 * k] * scale;
    p.b[k] = w[2 * k + 1] * scale;
  }
  return p;
}

inline constexpr int star_vertices = 64;

/// Star polygon c + rho * f(t_k) e^{i t_k} on a fixed angular grid, so polygons drawn about
/// the same centre nest exactly when their vertex radii do.
inline std::vector<point> star_polygon(point c, double rho, const star_profile& f) {
  std::vector<point> v(star_vertices);
  for (int k = 0; k < star_vertices; ++k) {
    const double t = 2.0 * pi * k / star_vertices;
    v[k] = c + std::polar(rho * f(t), t);
  }
  return v;
}

inline double max_radius(const std::vector<point>& v, point c = 0.0) {
  double m = 0.0;
  for (auto z : v) m = std::max(m, std::abs(z - c));
  return m;
}

inline double min_vertex_radius(const std::vector<point>& v, point c = 0.0) {
  double m = std::numeric_limits<double>::infinity();
  for (auto z : v) m = std::min(m, std::abs(z - c));
  return m;
}

inline report run_suite(const std::string& name, std::vector<std::string> columns, int trials, std::uint64_t seed,
                        const suite_options& opt,
                        const std::function<trial_outcome(std::mt19937_64&, int)>& trial) {
  if (trials < 1) throw rejection("suite: trials must be at least 1");
  std::vector<trial_outcome> out(trials);
  auto run = [&](int t) {
    auto g = trial_rng(seed, t);
    try {
      out[t] = trial(g, t);
    } catch (const rejection&) {
      out[t] = trial_outcome{};
      out[t].skipped = true;
    }
  };
  const int jobs = std::max(1, opt.jobs);
  if (jobs == 1) {
    for (int t = 0; t < trials; ++t) run(t);
  } else {
    std::vector<std::future<void>> pending;
    for (int w = 0; w < jobs; ++w)
      pending.push_back(std::async(std::launch::async, [&, w] {
        for (int t = w; t < trials; t += jobs) run(t);
      }));
    for (auto& f : pending) f.get();
  }
  report rep;
  rep.name = name;
  rep.columns = {"trial"};
  for (auto& c : columns) rep.columns.push_back(c);
  for (const char* c : {"margin", "error", "status"}) rep.columns.emplace_back(c);
  int skipped = 0, equalities = 0, violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const auto& o = out[t];
    std::vector<double> row{static_cast<double>(t)};
    double status = 0.0;
    if (o.skipped) {
      ++skipped;
      row.resize(rep.columns.size(), std::nan(""));
      row.back() = 2.0;
      rep.rows.push_back(std::move(row));
      continue;
    }
    if (o.values.size() != columns.size()) throw rejection("suite: trial produced the wrong number of values");
    const bool bad = o.margin < -(o.error + opt.tolerance);
    if (bad) {
      ++violations;
      status = 1.0;
    }
    if (o.equality) ++equalities;
    worst = std::min(worst, o.margin);
    for (double v : o.values) row.push_back(v);
    row.push_back(o.margin);
    row.push_back(o.error);
    row.push_back(status);
    rep.rows.push_back(std::move(row));
  }
  rep.violations = violations;
  rep.note("suite", name);
  rep.note("trials", static_cast<double>(trials));
  rep.note("skipped", static_cast<double>(skipped));
  rep.note("violations", static_cast<double>(violations));
  rep.note("worst_margin", worst);
  rep.note("tolerance", opt.tolerance);
  rep.note("equality_cases", static_cast<double>(equalities));
  rep.note("seed", static_cast<double>(seed));
  return rep;
}

inline modulus_result ring_mod(const ring_domain_spec& r, const suite_options& opt) {
  return ring_modulus(r, opt.resolution, opt.modulus);
}

inline ring_domain_spec between_polys(const std::vector<point>& outer, const std::vector<point>& inner) {
  return ring_domain_spec::between(domain_spec(polygon{outer}), domain_spec(polygon{inner}));
}

}  // namespace detail

/// M' <= M for a subring separating the same continua.
inline report check_monotonicity(int trials, std::uint64_t seed, const suite_options& opt = {}) {
  return detail::run_suite("monotonicity", {"M_sub", "M"}, trials, seed, opt, [&](std::mt19937_64& g, int t) {
    using namespace detail;
    const point c(uniform(g, -0.2, 0.2), uniform(g, -0.2, 0.2));
    const double r_in = uniform(g, 0.5, 1.5), r_out = r_in * uniform(g, 2.5, 8.0);
    const auto fi = random_profile(g, 0.25), fo = random_profile(g, 0.25);
    const auto inner = star_polygon(c, r_in, fi), outer = star_polygon(c, r_out, fo);
    trial_outcome o;
    if (t % 10 == 0) {
      // The subring is the ring itself.
      const auto m = ring_mod(between_polys(outer, inner), opt);
      o.values = {m.value, m.value};
      o.error = 2.0 * m.error_estimate;
      o.equality = true;
      return o;
    }
    // Thicken the inner continuum and shrink the outer one along the same rays.
    const double grow = uniform(g, 1.05, 1.6), shrink = uniform(g, 0.65, 0.95);
    const auto gi = random_profile(g, 0.1), go = random_profile(g, 0.1);
    std::vector<point> inner2(star_vertices), outer2(star_vertices);
    for (int k = 0; k < star_vertices; ++k) {
      const double th = 2.0 * pi * k / star_vertices;
      inner2[k] = c + std::polar(r_in * fi(th) * grow * (1.0 + std::abs(gi(th) - 1.0)), th);
      outer2[k] = c + std::polar(r_out * fo(th) * shrink * (1.0 - std::abs(go(th) - 1.0)), th);
      if (std::abs(outer2[k] - c) <= std::abs(inner2[k] - c) * 1.05) throw rejection("subring collapsed");
    }
    const auto M = ring_mod(between_polys(outer, inner), opt);
    const auto Ms = ring_mod(between_polys(outer2, inner2), opt);
    o.values = {Ms.value, M.value};
    o.margin = M.value - Ms.value;
    o.error = M.error_estimate + Ms.error_estimate;
    return o;
  });
}

/// M' + M'' <= M for two disjoint subrings, each separating the continua.
inline report check_superadditivity(int trials, std::uint64_t seed, const suite_options& opt = {}) {
  return detail::run_suite("superadditivity", {"M1", "M2", "M"}, trials, seed, opt, [&](std::mt19937_64& g, int t) {
    using namespace detail;
    trial_outcome o;
    const double r1 = uniform(g, 0.5, 1.5), r2 = r1 * uniform(g, 1.6, 4.0), r3 = r2 * uniform(g, 1.6, 4.0);
    if (t % 10 == 0) {
      // Concentric circles: additivity is exact.
      const domain_spec a(disk{0.0, r1}), b(disk{0.0, r2}), cc(disk{0.0, r3});
      const auto m1 = ring_mod(ring_domain_spec::between(b, a), opt);
      const auto m2 = ring_mod(ring_domain_spec::between(cc, b), opt);
      const auto m = ring_mod(ring_domain_spec::between(cc, a), opt);
      o.values = {m1.value, m2.value, m.value};
      o.margin = m.value - m1.value - m2.value;
      o.error = m.error_estimate + m1.error_estimate + m2.error_estimate;
      o.equality = true;
      return o;
    }
    const point c(uniform(g, -0.2, 0.2), uniform(g, -0.2, 0.2));
    const auto fi = random_profile(g, 0.2), fm = random_profile(g, 0.2), fo = random_profile(g, 0.2);
    const auto inner = star_polygon(c, r1, fi), mid = star_polygon(c, r2, fm), outer = star_polygon(c, r3, fo);
    for (int k = 0; k < star_vertices; ++k)
      if (std::abs(mid[k] - c) < 1.1 * std::abs(inner[k] - c) || std::abs(outer[k] - c) < 1.1 * std::abs(mid[k] - c))
        throw rejection("split curve leaves the ring");
    const auto m1 = ring_mod(between_polys(mid, inner), opt);
    const auto m2 = ring_mod(between_polys(outer, mid), opt);
    const auto m = ring_mod(between_polys(outer, inner), opt);
    o.values = {m1.value, m2.value, m.value};
    o.margin = m.value - m1.value - m2.value;
    o.error = m.error_estimate + m1.error_estimate + m2.error_estimate;
    return o;
  });
}

/// 2 pi M <= F for rings about the origin; 2 pi M~ <= F~ for simply connected domains at 0.
inline report check_log_area(int trials, std::uint64_t seed, const suite_options& opt = {}) {
  return detail::run_suite("log_area", {"reduced", "two_pi_M", "F"}, trials, seed, opt, [&](std::mt19937_64& g, int t) {
    using namespace detail;
    trial_outcome o;
    const bool reduced = t % 2 == 1;
    const bool round = t % 10 < 2;
    if (!reduced) {
      const double r = uniform(g, 0.3, 2.0), R = r * uniform(g, 1.5, 10.0);
      std::optional<ring_domain_spec> ring;
      if (round) ring = ring_domain_spec::named(domain_spec(annulus{r, R}));
      else {
        const point c(uniform(g, -0.1, 0.1) * r, uniform(g, -0.1, 0.1) * r);
        const auto fi = random_profile(g, 0.3), fo = random_profile(g, 0.3);
        const auto inner = star_polygon(c, r, fi), outer = star_polygon(c, R, fo);
        for (int k = 0; k < star_vertices; ++k)
          if (std::abs(outer[k] - c) < 1.2 * std::abs(inner[k] - c)) throw rejection("ring too thin");
        ring = between_polys(outer, inner);
      }
      const auto m = ring_mod(*ring, opt);
      const double F = logarithmic_area(*ring);
      o.values = {0.0, 2.0 * pi * m.value, F};
      o.margin = F - 2.0 * pi * m.value;
      o.error = 2.0 * pi * m.error_estimate + 1e-8 * std::abs(F);
      o.equality = round;
      return o;
    }
    const double r = uniform(g, 0.5, 3.0);
    std::optional<domain_spec> d;
    if (round) d = domain_spec(disk{0.0, r});
    else {
      const point c(uniform(g, -0.2, 0.2) * r, uniform(g, -0.2, 0.2) * r);
      d = domain_spec(polygon{star_polygon(c, r, random_profile(g, 0.3))});
    }
    const auto m = reduced_modulus(*d, point(0.0), opt.resolution, opt.modulus);
    const double F = reduced_logarithmic_area(*d);
    o.values = {1.0, 2.0 * pi * m.module.value, F};
    o.margin = F - 2.0 * pi * m.module.value;
    o.error = 2.0 * pi * m.module.error_estimate + 1e-8 * std::abs(F);
    o.equality = round;
    return o;
  });
}

/// M~' + M~'' <= 0 for disjoint domains about 0 and about infinity.
inline report check_reduced_sum(int trials, std::uint64_t seed, const suite_options& opt = {}) {
  return detail::run_suite("reduced_sum", {"M1", "M2", "sum"}, trials, seed, opt, [&](std::mt19937_64& g, int t) {
    using namespace detail;
    trial_outcome o;
    const double a = uniform(g, 0.5, 3.0);
    std::optional<domain_spec> inner, outer;
    if (t % 10 == 0) {
      inner = domain_spec(disk{0.0, a});
      outer = complement(domain_spec(disk{0.0, a}));
      o.equality = true;
    } else if (t % 2 == 0) {
      // Off-centre disk about 0, exterior of a larger disk.
      const point c = std::polar(uniform(g, 0.0, 0.6) * a, uniform(g, 0.0, 2.0 * pi));
      const point c2 = std::polar(uniform(g, 0.0, 0.3) * a, uniform(g, 0.0, 2.0 * pi));
      const double R = std::abs(c - c2) + a * uniform(g, 1.05, 2.0);
      inner = domain_spec(disk{c, a});
      outer = complement(domain_spec(disk{c2, R}));
    } else {
      const point c(uniform(g, -0.2, 0.2) * a, uniform(g, -0.2, 0.2) * a);
      const auto fi = random_profile(g, 0.25), fo = random_profile(g, 0.25);
      const double grow = uniform(g, 1.1, 2.5);
      const auto in = star_polygon(c, a, fi);
      const auto out = star_polygon(c, a * grow * 1.6, fo);
      for (int k = 0; k < star_vertices; ++k)
        if (std::abs(out[k] - c) < 1.05 * std::abs(in[k] - c)) throw rejection("domains overlap");
      inner = domain_spec(polygon{in});
      outer = complement(domain_spec(polygon{out}));
    }
    const auto m1 = reduced_modulus(*inner, point(0.0), opt.resolution, opt.modulus);
    const auto m2 = reduced_modulus(*outer, std::nullopt, opt.resolution, opt.modulus);
    const double sum = m1.module.value + m2.module.value;
    o.values = {m1.module.value, m2.module.value, sum};
    o.margin = -sum;
    o.error = m1.module.error_estimate + m2.module.error_estimate;
    return o;
  });
}

/// M <= log Phi(P) for rings separating the closed unit disk from infinity whose outer
/// continuum comes within P of the origin.
inline report check_grotzsch_extremal(int trials, std::uint64_t seed, const suite_options& opt = {}) {
  return detail::run_suite("grotzsch_extremal", {"P", "M", "log_phi"}, trials, seed, opt, [&](std::mt19937_64& g, int t) {
    using namespace detail;
    trial_outcome o;
    const double P = uniform(g, 1.3, 6.0);
    const double th = uniform(g, 0.0, 2.0 * pi);
    std::optional<ring_domain_spec> ring;
    const domain_spec unit(disk{0.0, 1.0});
    switch (t % 4) {
      case 0:  // the extremal domain, rotated
        ring = ring_domain_spec::between(domain_spec(plane_minus_slits{{slit{std::polar(P, th), std::polar(2.0 * P, th), true}}}), unit);
        o.equality = true;
        break;
      case 1: {  // a ray leaving at an angle
        const point s = std::polar(P, th);
        const double tilt = uniform(g, -1.2, 1.2);
        ring = ring_domain_spec::between(domain_spec(plane_minus_slits{{slit{s, s + std::polar(1.0, th + tilt), true}}}), unit);
        break;
      }
      case 2: {  // two rays, the nearer at distance P
        const double th2 = th + uniform(g, 0.5, 2.0 * pi - 0.5);
        const double P2 = P * uniform(g, 1.0, 2.0);
        ring = ring_domain_spec::between(
            domain_spec(plane_minus_slits{{slit{std::polar(P, th), std::polar(2.0 * P, th), true},
                                           slit{std::polar(P2, th2), std::polar(2.0 * P2, th2), true}}}),
            unit);
        break;
      }
      default: {  // bounded outer polygon touching |z| = P
        const auto v = star_polygon(0.0, P * 1.3, random_profile(g, 0.3));
        const double d = geom::polygon_boundary_distance(0.0, v);
        if (!(d > 1.1)) throw rejection("polygon too close to the unit disk");
        ring = ring_domain_spec::between(domain_spec(polygon{v}), unit);
        const double bound = log_grotzsch_phi(d);
        const auto m = ring_mod(*ring, opt);
        o.values = {d, m.value, bound};
        o.margin = bound - m.value;
        o.error = m.error_estimate;
        return o;
      }
    }
    const auto m = ring_mod(*ring, opt);
    const double bound = log_grotzsch_phi(P);
    o.values = {P, m.value, bound};
    o.margin = bound - m.value;
    o.error = m.error_estimate;
    return o;
  });
}

/// M <= log Psi(|b| / |a|) for rings separating {0, a} from {b, infinity}.
inline report check_teich_extremal(int trials, std::uint64_t seed, const suite_options& opt = {}) {
  return detail::run_suite("teich_extremal", {"rho", "P", "M", "log_psi"}, trials, seed, opt, [&](std::mt19937_64& g, int t) {
    using namespace detail;
    trial_outcome o;
    const double rho = uniform(g, 0.3, 2.0);
    const double P = rho * uniform(g, 0.5, 6.0);
    const double phi = uniform(g, 0.0, 2.0 * pi), th = uniform(g, 0.0, 2.0 * pi);
    std::optional<ring_domain_spec> ring;
    if (t % 3 == 0) {
      ring = ring_domain_spec::named(domain_spec(teichmuller{rho, P}));
      o.equality = true;
    } else {
      const point a = std::polar(rho, phi), b = std::polar(P, th);
      if (std::abs(a - b) < 0.2 * rho) throw rejection("points too close");
      const domain_spec inner(polygon{{0.0, a}});
      const double tilt = t % 3 == 1 ? 0.0 : uniform(g, -1.0, 1.0);
      const point dir = std::polar(1.0, th + tilt);
      // The ray must avoid the segment [0, a].
      if (geom::segment_segment_distance(0.0, a, b, b + 1e3 * dir) < 0.05 * rho) throw rejection("ray meets the inner continuum");
      ring = ring_domain_spec::between(domain_spec(plane_minus_slits{{slit{b, b + dir, true}}}), inner);
    }
    const auto m = ring_mod(*ring, opt);
    const double bound = log_teich_psi(P / rho);
    o.values = {rho, P, m.value, bound};
    o.margin = bound - m.value;
    o.error = m.error_estimate;
    return o;
  });
}

/// Rings about the closed unit disk inside |z| < R2 whose outer continuum reaches |z| <= P1
/// have module at most that of the slit annulus.
inline report check_slit_annulus_extremal(int trials, std::uint64_t seed, const suite_options& opt = {}) {
  return detail::run_suite("slit_annulus_extremal", {"R2", "P1", "M", "M_slit"}, trials, seed, opt,
                           [&](std::mt19937_64& g, int t) {
    using namespace detail;
    trial_outcome o;
    const double P1 = uniform(g, 1.3, 3.0), R2 = P1 * uniform(g, 1.3, 3.0);
    const auto ext = ring_mod(ring_domain_spec::named(domain_spec(slit_annulus{R2, P1})), opt);
    std::optional<ring_domain_spec> ring;
    const domain_spec unit(disk{0.0, 1.0});
    if (t % 4 == 0) {
      o.values = {R2, P1, ext.value, ext.value};
      o.error = 2.0 * ext.error_estimate;
      o.equality = true;
      return o;
    }
    if (t % 4 == 1) {
      ring = ring_domain_spec::between(domain_spec(disk{0.0, uniform(g, 1.05, P1)}), unit);
    } else {
      // Star polygon inside |z| < R2 with a vertex pulled in to |z| = r <= P1.
      auto v = star_polygon(0.0, 0.5 * (P1 + R2), random_profile(g, 0.2));
      for (auto& z : v)
        if (std::abs(z) >= R2) z *= 0.99 * R2 / std::abs(z);
      const int k = static_cast<int>(uniform(g, 0.0, star_vertices - 1e-9));
      v[k] *= uniform(g, 1.05, P1) / std::abs(v[k]);
      if (!geom::is_simple_polygon(v) || geom::polygon_boundary_distance(0.0, v) <= 1.02) throw rejection("bad competitor");
      ring = ring_domain_spec::between(domain_spec(polygon{v}), unit);
    }
    const auto m = ring_mod(*ring, opt);
    o.values = {R2, P1, m.value, ext.value};
    o.margin = ext.value - m.value;
    o.error = m.error_estimate + ext.error_estimate;
    return o;
  });
}

/// Side pairs of a quadrilateral: a/b is the module with b, d as the Dirichlet sides, alpha
/// and beta the distances between b, d and between a, c (straight inside a convex polygon).
inline report check_quad_inequalities(int trials, std::uint64_t seed, const suite_options& opt = {}) {
  return detail::run_suite("quad_inequalities", {"module", "F", "alpha", "beta", "prop5", "alpha_beta", "min_sq"},
                           trials, seed, opt, [&](std::mt19937_64& g, int t) {
    using namespace detail;
    trial_outcome o;
    std::vector<point> v;
    if (t % 10 == 0) {
      const double w = uniform(g, 0.5, 3.0), h = t % 20 == 0 ? w : uniform(g, 0.5, 3.0);
      v = {{0, 0}, {w, 0}, {w, h}, {0, h}};
      o.equality = true;
    } else {
      for (int k = 0; k < 4; ++k) {
        const double th = pi / 2.0 * k + uniform(g, -0.5, 0.5);
        v.push_back(std::polar(uniform(g, 0.6, 1.6), th) * point(uniform(g, 0.7, 1.5), 0.0));
      }
      if (!geom::is_convex_polygon(v)) throw rejection("not convex");
    }
    const quadrilateral_spec q(v, {0, 1, 2, 3});
    const auto m = quad_modulus(q.conjugate(), opt.resolution, opt.modulus);
    const double F = q.area();
    const double alpha = geom::segment_segment_distance(v[1], v[2], v[3], v[0]);
    const double beta = geom::segment_segment_distance(v[0], v[1], v[2], v[3]);
    const double prop5 = F / (beta * beta) - m.value;                // a/b <= F / beta^2
    const double lower = m.value - alpha * alpha / F;                // alpha^2 / F <= a/b
    const double ab = F - alpha * beta;                              // alpha beta <= F
    const double mn = F - std::pow(std::min(alpha, beta), 2);        // min^2 <= F
    o.values = {m.value, F, alpha, beta, prop5, ab, mn};
    o.margin = std::min({prop5, lower, ab, mn});
    o.error = m.error_estimate + 1e-12 * F;
    return o;
  });
}

/// Rings about the origin with module at least `threshold` contain a circle |z| = c.
inline report check_circle_containment(int trials, std::uint64_t seed, double threshold = pi,
                                       const suite_options& opt = {}) {
  auto rep = detail::run_suite("circle_containment", {"M", "inner_max", "outer_min"}, trials, seed, opt,
                               [&](std::mt19937_64& g, int t) {
    using namespace detail;
    trial_outcome o;
    const double r = uniform(g, 0.5, 1.5);
    const double R = r * std::exp(threshold) * uniform(g, 0.9, 3.0);
    const auto inner = star_polygon(0.0, r, random_profile(g, t % 2 ? 0.6 : 0.3));
    const auto outer = star_polygon(0.0, R, random_profile(g, t % 2 ? 0.6 : 0.3));
    if (!geom::is_simple_polygon(inner) || !geom::is_simple_polygon(outer)) throw rejection("bad polygon");
    for (int k = 0; k < star_vertices; ++k)
      if (std::abs(outer[k]) < 1.05 * std::abs(inner[k])) throw rejection("ring too thin");
    const auto m = ring_mod(between_polys(outer, inner), opt);
    // Only rings whose module clears the threshold beyond the error bar take part.
    if (m.value - m.error_estimate < threshold) throw rejection("module below threshold");
    const double in_max = max_radius(inner);
    const double out_min = geom::polygon_boundary_distance(0.0, outer);
    o.values = {m.value, in_max, out_min};
    o.margin = std::log(out_min / in_max);
    o.error = 0.0;
    return o;
  });
  rep.note("threshold", threshold);
  // Borderline configuration: teichmuller(rho, P) contains a circle exactly when P > rho,
  // and its module there is log Psi(1).
  rep.note("teichmuller_borderline_module", log_teich_psi(1.0));
  return rep;
}

}  // namespace ringmod
