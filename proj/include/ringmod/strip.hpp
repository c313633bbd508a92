#pragma once

// Strip domains: simply connected regions with two marked ends. The cross-cut width
// profile Theta(x), the Ahlfors distortion inequality and its refinement, and the
// length-area bound for the quadrilateral between two cross-cuts.
//
// A strip is a polygon window (the part of the domain used for geometry) with the two
// ends marked by points. With an explicit map w = F(z) onto {0 < Im w < B} the real
// part u = Re w is exact; without one it comes from the potential of the window
// viewed as a quadrilateral between its end cuts.

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "ringmod/errors.hpp"
#include "ringmod/expr.hpp"
#include "ringmod/geometry.hpp"
#include "ringmod/grid.hpp"
#include "ringmod/modsolver.hpp"
#include "ringmod/report.hpp"
#include "ringmod/solver.hpp"

namespace ringmod {

class strip_spec {
 public:
  strip_spec(std::vector<point> window, point end1, point end2) : window_(std::move(window)), end1_(end1), end2_(end2) {
    if (window_.size() < 3 || !geom::is_simple_polygon(window_)) throw rejection("strip window must be a simple polygon");
    if (!(end1_.real() < end2_.real())) throw rejection("strip ends must satisfy Re r1 < Re r2");
    if (geom::polygon_signed_area(window_) < 0.0) std::reverse(window_.begin(), window_.end());
  }

  strip_spec& with_map(expr F, double B) {
    if (!(B > 0.0)) throw rejection("strip map: width B must be positive");
    map_ = std::move(F);
    dmap_ = map_->derivative();
    B_ = B;
    spot_check();
    return *this;
  }

  /// {0 < y < B} for x_lo < x < x_hi, w = z.
  static strip_spec straight(double B, double x_lo, double x_hi) {
    strip_spec s({{x_lo, 0}, {x_hi, 0}, {x_hi, B}, {x_lo, B}}, {x_lo, 0.5 * B}, {x_hi, 0.5 * B});
    return s.with_map(expr::variable(), B);
  }

  /// {|arg z| < beta} cut off at Re z = length, w = log z + i beta.
  static strip_spec sector(double beta, double length) {
    if (!(beta > 0.0 && beta < 0.5 * pi)) throw rejection("sector: beta must lie in (0, pi/2)");
    const double t = std::tan(beta);
    strip_spec s({{0, 0}, {length, -length * t}, {length, length * t}}, {0, 0}, {length, 0});
    return s.with_map(expr::parse("log(z)", 'z') + expr::imag_unit() * expr::number(beta), 2.0 * beta);
  }

  /// {0 < y < B} on [x_lo, x_hi] with a tooth hanging from the top over [t0, t1], leaving a gap.
  static strip_spec comb(double B, double x_lo, double x_hi, double t0, double t1, double gap) {
    if (!(x_lo < t0 && t0 < t1 && t1 < x_hi && gap > 0.0 && gap < B)) throw rejection("comb: tooth must sit inside the strip");
    return strip_spec({{x_lo, 0}, {x_hi, 0}, {x_hi, B}, {t1, B}, {t1, gap}, {t0, gap}, {t0, B}, {x_lo, B}},
                      {x_lo, 0.5 * gap}, {x_hi, 0.5 * gap});
  }

  const std::vector<point>& window() const noexcept { return window_; }
  point end1() const noexcept { return end1_; }
  point end2() const noexcept { return end2_; }
  bool has_map() const noexcept { return map_.has_value(); }
  double B() const noexcept { return B_; }
  double u(point z) const { return (*map_)(z).real(); }
  const std::optional<expr>& map() const noexcept { return map_; }

 private:
  // The map must send sampled interior points into the strip with nonzero derivative.
  void spot_check() const {
    point lo = window_[0], hi = lo;
    for (auto v : window_) {
      lo = {std::min(lo.real(), v.real()), std::min(lo.imag(), v.imag())};
      hi = {std::max(hi.real(), v.real()), std::max(hi.imag(), v.imag())};
    }
    constexpr int n = 24;
    for (int i = 1; i < n; ++i)
      for (int j = 1; j < n; ++j) {
        const point z(lo.real() + (hi.real() - lo.real()) * i / n, lo.imag() + (hi.imag() - lo.imag()) * j / n);
        if (!geom::point_in_polygon(z, window_) || geom::polygon_boundary_distance(z, window_) < 1e-9) continue;
        const point w = (*map_)(z);
        const double slack = 1e-9 * B_;
        if (!(w.imag() > -slack && w.imag() < B_ + slack))
          throw rejection("strip map: sampled point leaves the strip 0 < Im w < B");
        if (!(std::abs((*dmap_)(z)) > 0.0)) throw rejection("strip map: derivative vanishes at a sampled point");
      }
  }

  std::vector<point> window_;
  point end1_, end2_;
  std::optional<expr> map_, dmap_;
  double B_ = 0.0;
};

// ---------------------------------------------------------------------------
// Cross-cuts

struct cross_cut {
  double x;
  double y0, y1;       // the distinguished interval on Re z = x
  int sections;        // number of intervals of the domain on the line
  double length() const { return y1 - y0; }
};

struct theta_profile_result {
  std::vector<double> x, theta;
  std::vector<std::uint8_t> multi;  // cross-section has more than one interval
};

namespace detail {

/// Exact intervals of {Re z = x} inside a polygon.
inline std::vector<std::pair<double, double>> vertical_sections(const std::vector<point>& poly, double x) {
  std::vector<double> ys;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const point a = poly[i], b = poly[(i + 1) % n];
    // Half-open in x so a vertex on the line is counted once.
    if ((a.real() <= x) != (b.real() <= x)) ys.push_back(a.imag() + (x - a.real()) / (b.real() - a.real()) * (b.imag() - a.imag()));
  }
  std::sort(ys.begin(), ys.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < ys.size(); i += 2)
    if (ys[i + 1] > ys[i]) out.emplace_back(ys[i], ys[i + 1]);
  return out;
}

/// Pixel raster of a strip window with 4-adjacency flood fills.
class strip_raster {
 public:
  strip_raster(const strip_spec& s, int resolution) : s_(s) {
    if (resolution < 16) throw rejection("strip: resolution must be at least 16");
    point lo = s.window()[0], hi = lo;
    for (auto v : s.window()) {
      lo = {std::min(lo.real(), v.real()), std::min(lo.imag(), v.imag())};
      hi = {std::max(hi.real(), v.real()), std::max(hi.imag(), v.imag())};
    }
    h_ = std::max(hi.real() - lo.real(), hi.imag() - lo.imag()) / resolution;
    x0_ = lo.real() - h_;
    y0_ = lo.imag() - h_;
    nx_ = static_cast<int>(std::ceil((hi.real() - x0_) / h_)) + 1;
    ny_ = static_cast<int>(std::ceil((hi.imag() - y0_) / h_)) + 1;
    inside_.assign(static_cast<std::size_t>(nx_) * ny_, 0);
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i) inside_[idx(i, j)] = geom::point_in_polygon(center(i, j), s.window());
    c1_ = nearest_inside(s.end1());
    c2_ = nearest_inside(s.end2());
  }

  double h() const { return h_; }

  cross_cut cut_at(double x) const {
    if (!(x > s_.end1().real() && x < s_.end2().real()))
      throw rejection("cross-cut: x must lie strictly between Re r1 and Re r2");
    const auto sections = vertical_sections(s_.window(), x);
    if (sections.empty()) throw rejection("cross-cut: the line Re z = x misses the strip");
    // Columns whose centres sit just left and right of the line.
    const int il = static_cast<int>(std::ceil((x - x0_) / h_ - 0.5)) - 1;
    const int ir = il + 1;
    if (center(c1_.first, c1_.second).real() >= x || center(c2_.first, c2_.second).real() <= x)
      throw diagnostic("cross-cut: resolution too coarse to separate the ends at x = " + format_number(x), h_);
    std::vector<std::uint8_t> left(inside_.size(), 0), right(inside_.size(), 0);
    fill(c1_, left, [&](int i, int j) { return center(i, j).real() < x; });
    fill(c2_, right, [&](int i, int j) { return !left[idx(i, j)]; });
    int best = -1, best_hits = 0;
    for (std::size_t k = 0; k < sections.size(); ++k) {
      const auto [a, b] = sections[k];
      int hits = 0;
      const int m = std::max(4, static_cast<int>(4.0 * (b - a) / h_));
      for (int q = 0; q < m; ++q) {
        const double y = a + (b - a) * (q + 0.5) / m;
        const int j = static_cast<int>(std::floor((y - y0_) / h_));
        if (il < 0 || ir >= nx_ || j < 0 || j >= ny_) continue;
        if (left[idx(il, j)] && right[idx(ir, j)]) ++hits;
      }
      if (hits > best_hits) {
        best = static_cast<int>(k);
        best_hits = hits;
      }
    }
    if (best < 0) throw diagnostic("cross-cut: resolution too coarse to separate components at x = " + format_number(x), h_);
    return {x, sections[best].first, sections[best].second, static_cast<int>(sections.size())};
  }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
  point center(int i, int j) const { return {x0_ + (i + 0.5) * h_, y0_ + (j + 0.5) * h_}; }

  std::pair<int, int> nearest_inside(point z) const {
    std::pair<int, int> best{-1, -1};
    double d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i)
        if (inside_[idx(i, j)]) {
          const double e = std::abs(center(i, j) - z);
          if (e < d) {
            d = e;
            best = {i, j};
          }
        }
    if (best.first < 0) throw rejection("strip: window has no interior at this resolution");
    return best;
  }

  template <class Allowed>
  void fill(std::pair<int, int> seed, std::vector<std::uint8_t>& mark, Allowed&& allowed) const {
    if (!allowed(seed.first, seed.second)) return;
    std::deque<std::pair<int, int>> q{seed};
    mark[idx(seed.first, seed.second)] = 1;
    constexpr int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    while (!q.empty()) {
      const auto [i, j] = q.front();
      q.pop_front();
      for (int d = 0; d < 4; ++d) {
        const int a = i + di[d], b = j + dj[d];
        if (a < 0 || a >= nx_ || b < 0 || b >= ny_) continue;
        const auto k = idx(a, b);
        if (mark[k] || !inside_[k] || !allowed(a, b)) continue;
        mark[k] = 1;
        q.emplace_back(a, b);
      }
    }
  }

  const strip_spec& s_;
  double h_, x0_, y0_;
  int nx_, ny_;
  std::vector<std::uint8_t> inside_;
  std::pair<int, int> c1_, c2_;
};

}  // namespace detail

inline theta_profile_result theta_profile(const strip_spec& s, const std::vector<double>& xs, int resolution = 256) {
  const detail::strip_raster R(s, resolution);
  theta_profile_result out;
  for (double x : xs) {
    const auto c = R.cut_at(x);
    out.x.push_back(x);
    out.theta.push_back(c.length());
    out.multi.push_back(c.sections > 1);
  }
  return out;
}

struct theta_integral {
  double value;
  double error;
  int samples;
  double theta_min;
};

/// Integral of dx / Theta over [x1, x2]: trapezoid rule on a uniform grid with extra
/// points around local minima of Theta; the error is the change from the coarse half.
inline theta_integral integrate_inverse_theta(const strip_spec& s, double x1, double x2, int samples = 256,
                                              int resolution = 256) {
  if (!(x1 < x2)) throw rejection("theta integral: need x1 < x2");
  const detail::strip_raster R(s, resolution);
  std::vector<double> xs(samples + 1), th(samples + 1);
  for (int k = 0; k <= samples; ++k) {
    xs[k] = x1 + (x2 - x1) * k / samples;
    th[k] = R.cut_at(xs[k]).length();
  }
  auto trapezoid = [](const std::vector<double>& x, const std::vector<double>& t, int stride) {
    double acc = 0.0;
    for (std::size_t k = 0; k + stride < x.size(); k += stride) acc += 0.5 * (x[k + stride] - x[k]) * (1.0 / t[k] + 1.0 / t[k + stride]);
    return acc;
  };
  const double coarse = trapezoid(xs, th, 2);
  // Refine around minima.
  std::vector<std::pair<double, double>> pts;
  for (int k = 0; k <= samples; ++k) pts.emplace_back(xs[k], th[k]);
  for (int k = 1; k < samples; ++k)
    if (th[k] <= th[k - 1] && th[k] <= th[k + 1] && (th[k] < th[k - 1] || th[k] < th[k + 1]))
      for (int q = 1; q < 8; ++q)
        for (int side : {-1, 1}) {
          const double x = xs[k] + side * (xs[k + 1] - xs[k]) * q / 8.0;
          pts.emplace_back(x, R.cut_at(x).length());
        }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first == b.first; }), pts.end());
  std::vector<double> fx, ft;
  for (auto& [x, t] : pts) {
    fx.push_back(x);
    ft.push_back(t);
  }
  const double fine = trapezoid(fx, ft, 1);
  return {fine, std::max(std::abs(fine - coarse), 1e-12), static_cast<int>(fx.size()),
          *std::min_element(ft.begin(), ft.end())};
}

// ---------------------------------------------------------------------------
// The quadrilateral between two cross-cuts

namespace detail {

inline std::vector<point> clip_half(const std::vector<point>& poly, double x, bool keep_right) {
  std::vector<point> out;
  const std::size_t n = poly.size();
  auto in = [&](point p) { return keep_right ? p.real() >= x : p.real() <= x; };
  for (std::size_t i = 0; i < n; ++i) {
    const point a = poly[i], b = poly[(i + 1) % n];
    if (in(a)) out.push_back(a);
    if (in(a) != in(b)) {
      const double t = (x - a.real()) / (b.real() - a.real());
      out.push_back({x, a.imag() + t * (b.imag() - a.imag())});
    }
  }
  std::vector<point> clean;
  for (auto p : out)
    if (clean.empty() || std::abs(p - clean.back()) > 1e-12) clean.push_back(p);
  while (clean.size() > 1 && std::abs(clean.front() - clean.back()) <= 1e-12) clean.pop_back();
  return clean;
}

}  // namespace detail

/// The part of the window between Re z = x1 and Re z = x2 as a quadrilateral whose sides
/// a and c are the cuts; the cuts must be the distinguished cross-cuts.
inline quadrilateral_spec strip_quadrilateral(const strip_spec& s, double x1, double x2, int resolution = 256,
                                              bool check_cuts = true) {
  auto poly = detail::clip_half(detail::clip_half(s.window(), x1, true), x2, false);
  if (poly.size() < 4) throw rejection("strip quadrilateral: clipped window is degenerate");
  const int n = static_cast<int>(poly.size());
  int a0 = -1, c0 = -1;
  for (int i = 0; i < n; ++i) {
    const point p = poly[i], q = poly[(i + 1) % n];
    if (p.real() == x1 && q.real() == x1) {
      if (a0 >= 0) throw rejection("strip quadrilateral: cross-section at x1 is not a single segment");
      a0 = i;
    }
    if (p.real() == x2 && q.real() == x2) {
      if (c0 >= 0) throw rejection("strip quadrilateral: cross-section at x2 is not a single segment");
      c0 = i;
    }
  }
  if (a0 < 0 || c0 < 0) throw rejection("strip quadrilateral: cut sides not found");
  if (!check_cuts) return quadrilateral_spec(poly, {a0, (a0 + 1) % n, c0, (c0 + 1) % n});
  const detail::strip_raster R(s, resolution);
  const auto k1 = R.cut_at(x1), k2 = R.cut_at(x2);
  const double la = std::abs(poly[(a0 + 1) % n] - poly[a0]), lc = std::abs(poly[(c0 + 1) % n] - poly[c0]);
  if (std::abs(la - k1.length()) > 1e-9 * (1.0 + la) || std::abs(lc - k2.length()) > 1e-9 * (1.0 + lc))
    throw rejection("strip quadrilateral: the clipped window is not bounded by the cross-cuts");
  return quadrilateral_spec(poly, {a0, (a0 + 1) % n, c0, (c0 + 1) % n});
}

// ---------------------------------------------------------------------------
// u = Re w along cross-cuts

struct u_extent {
  double lo, hi;    // min and max of u over the cut
  double error;
};

namespace detail {

inline double bilinear_potential(const labeled_grid& g, const std::vector<double>& pot, point z) {
  const auto& L = g.grid();
  const auto [fu, fv] = L.coords(z);
  const int i = static_cast<int>(std::floor(fu)), j = static_cast<int>(std::floor(fv));
  const double tx = fu - i, ty = fv - j;
  double acc = 0.0, wsum = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const int ii = i + a, jj = j + b;
      if (ii < 0 || jj < 0 || ii >= L.nx() || jj >= L.ny()) continue;
      const double v = pot[L.index(ii, jj)];
      if (!std::isfinite(v)) continue;
      const double w = (a ? tx : 1.0 - tx) * (b ? ty : 1.0 - ty) + 1e-9;
      acc += w * v;
      wsum += w;
    }
  if (wsum > 0.0) return acc / wsum;
  // Off the unknowns: nearest finite node within two cells.
  double best = std::numeric_limits<double>::quiet_NaN(), d = std::numeric_limits<double>::infinity();
  for (int a = -2; a <= 3; ++a)
    for (int b = -2; b <= 3; ++b) {
      const int ii = i + a, jj = j + b;
      if (ii < 0 || jj < 0 || ii >= L.nx() || jj >= L.ny()) continue;
      const double v = pot[L.index(ii, jj)];
      const double e = std::abs(L.node(ii, jj) - z);
      if (std::isfinite(v) && e < d) {
        d = e;
        best = v;
      }
    }
  return best;
}

/// Potential of the window between its end cuts, scaled so that u = B * M * potential.
struct window_potential {
  labeled_grid grid;
  std::vector<double> pot;
  double scale;
};

inline window_potential make_window_potential(const strip_spec& s, double B, int resolution) {
  const double e = 1e-6 * (s.end2().real() - s.end1().real());
  const auto q = strip_quadrilateral(s, s.end1().real() + e, s.end2().real() - e, resolution, false);
  auto g = rasterize(q, resolution);
  auto sol = solve_harmonic(g);
  const double M = quad_modulus(g).value;
  return {std::move(g), std::move(sol.potential), B * M};
}

}  // namespace detail

/// Extent of u over the distinguished cross-cut at x.
inline u_extent u_on_cut(const strip_spec& s, double x, int resolution = 256, double B_geometric = 1.0) {
  const detail::strip_raster R(s, resolution);
  const auto c = R.cut_at(x);
  if (s.has_map()) {
    constexpr int m = 1024;
    std::vector<double> us(m + 1);
    for (int k = 0; k <= m; ++k) us[k] = s.u({x, c.y0 + (c.y1 - c.y0) * k / m});
    auto polish = [&](int k, double sign) {
      const double a = c.y0 + (c.y1 - c.y0) * std::max(0, k - 1) / m;
      const double b = c.y0 + (c.y1 - c.y0) * std::min(m, k + 1) / m;
      const auto r = boost::math::tools::brent_find_minima([&](double y) { return sign * s.u({x, y}); }, a, b, 50);
      return std::min(sign * us[k], r.second) * sign;
    };
    const int klo = static_cast<int>(std::min_element(us.begin(), us.end()) - us.begin());
    const int khi = static_cast<int>(std::max_element(us.begin(), us.end()) - us.begin());
    return {polish(klo, 1.0), polish(khi, -1.0), 1e-10 * (1.0 + std::abs(us[khi]))};
  }
  // Geometric path: potentials at two resolutions; their spread is the error bar.
  u_extent out{};
  double prev_lo = 0.0, prev_hi = 0.0;
  for (int level = 0; level < 2; ++level) {
    const int N = level == 0 ? resolution / 2 : resolution;
    const auto wp = detail::make_window_potential(s, B_geometric, N);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    constexpr int m = 256;
    for (int k = 0; k <= m; ++k) {
      const double v = wp.scale * detail::bilinear_potential(wp.grid, wp.pot, {x, c.y0 + (c.y1 - c.y0) * k / m});
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (level == 1) out = {lo, hi, std::max(std::abs(lo - prev_lo), std::abs(hi - prev_hi)) + 2.0 * wp.scale / N};
    prev_lo = lo;
    prev_hi = hi;
  }
  return out;
}

/// (4 log 2)/pi + (1/pi) log(1/(1 - 8 e^{-pi I})).
inline double refined_constant(double I) {
  const double q = 8.0 * std::exp(-pi * I);
  if (!(q < 1.0)) throw rejection("hypothesis not met: 8 exp(-pi I) must be below 1");
  return 4.0 * std::log(2.0) / pi - std::log1p(-q) / pi;
}

struct strip_options {
  int samples = 256;
  int resolution = 256;
  double B = 1.0;  // strip width for the geometric path
};

namespace detail {

struct distortion_sides {
  theta_integral I;
  u_extent left, right;
  double B;
  double lhs, lhs_error;
};

inline distortion_sides distortion(const strip_spec& s, double x1, double x2, const strip_options& opt) {
  distortion_sides d{};
  d.I = integrate_inverse_theta(s, x1, x2, opt.samples, opt.resolution);
  d.B = s.has_map() ? s.B() : opt.B;
  d.left = u_on_cut(s, x1, opt.resolution, d.B);
  d.right = u_on_cut(s, x2, opt.resolution, d.B);
  d.lhs = (d.right.lo - d.left.hi) / d.B;
  d.lhs_error = (d.left.error + d.right.error) / d.B;
  return d;
}

inline void note_common(report& rep, const strip_spec& s, const distortion_sides& d, double x1, double x2) {
  rep.note("x1", x1);
  rep.note("x2", x2);
  rep.note("path", s.has_map() ? "explicit map" : "window potential");
  rep.note("B", d.B);
  rep.note("I", d.I.value);
  rep.note("I_error", d.I.error);
  rep.note("u1_right", d.right.lo);
  rep.note("u2_left", d.left.hi);
  rep.note("lhs", d.lhs);
  rep.note("lhs_error", d.lhs_error);
}

}  // namespace detail

/// (u1(x2) - u2(x1)) / B > I - 4 whenever I > 2.
inline report ahlfors_check(const strip_spec& s, double x1, double x2, const strip_options& opt = {}) {
  report rep;
  rep.name = "ahlfors distortion";
  const auto d = detail::distortion(s, x1, x2, opt);
  detail::note_common(rep, s, d, x1, x2);
  rep.columns = {"x1", "x2", "I", "lhs", "rhs", "margin"};
  const double rhs = d.I.value - 4.0;
  rep.add_row({x1, x2, d.I.value, d.lhs, rhs, d.lhs - rhs});
  rep.note("rhs", rhs);
  rep.note("margin", d.lhs - rhs);
  if (!(d.I.value > 2.0)) {
    rep.note("verdict", "hypothesis not met");
    return rep;
  }
  const bool holds = d.lhs - rhs > -(d.lhs_error + d.I.error);
  if (!holds) rep.violations = 1;
  rep.note("verdict", holds ? "holds" : "violated");
  return rep;
}

/// Integral of dx / Theta against the module of the quadrilateral between the cuts.
inline report theta_module_bound(const strip_spec& s, double x1, double x2, const strip_options& opt = {},
                                 const modulus_options& mopt = {}) {
  report rep;
  rep.name = "theta module bound";
  const auto I = integrate_inverse_theta(s, x1, x2, opt.samples, opt.resolution);
  const auto q = strip_quadrilateral(s, x1, x2, opt.resolution);
  const auto m = quad_modulus(q, opt.resolution, mopt);
  rep.columns = {"x1", "x2", "I", "module", "margin"};
  rep.add_row({x1, x2, I.value, m.value, m.value - I.value});
  const bool holds = I.value <= m.value + m.error_estimate + I.error;
  if (!holds) rep.violations = 1;
  rep.note("x1", x1);
  rep.note("x2", x2);
  rep.note("I", I.value);
  rep.note("I_error", I.error);
  rep.note("module", m.value);
  rep.note("module_error", m.error_estimate);
  rep.note("margin", m.value - I.value);
  rep.note("verdict", holds ? "holds" : "violated");
  return rep;
}

/// (u1(x2) - u2(x1)) / B > I - refined_constant(I).
inline report refined_distortion_check(const strip_spec& s, double x1, double x2, const strip_options& opt = {}) {
  report rep;
  rep.name = "refined distortion";
  const auto d = detail::distortion(s, x1, x2, opt);
  detail::note_common(rep, s, d, x1, x2);
  rep.columns = {"x1", "x2", "I", "lhs", "bound", "coarse_bound", "margin"};
  if (!(8.0 * std::exp(-pi * d.I.value) < 1.0)) {
    rep.note("verdict", "hypothesis not met");
    return rep;
  }
  const double k = refined_constant(d.I.value);
  const double bound = d.I.value - k, coarse = d.I.value - 4.0;
  rep.add_row({x1, x2, d.I.value, d.lhs, bound, coarse, d.lhs - bound});
  rep.note("constant", k);
  rep.note("bound", bound);
  rep.note("coarse_bound", coarse);
  rep.note("margin", d.lhs - bound);
  rep.note("coarse_margin", d.lhs - coarse);
  const bool holds = d.lhs - bound > -(d.lhs_error + d.I.error);
  const bool sharper = d.I.value <= 2.0 || k <= 4.0;
  if (!holds || !sharper) rep.violations = 1;
  rep.note("never_weaker", sharper ? "yes" : "no");
  rep.note("verdict", holds ? "holds" : "violated");
  return rep;
}

}  // namespace ringmod
