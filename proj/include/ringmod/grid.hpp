#pragma once

// Lattice rasterization of ring domains and quadrilaterals.
//
// Ring domains are laid on a log-polar lattice (s, theta) about a point of the inner
// complementary continuum: z = c + exp(s + i theta), periodic in theta. The Dirichlet
// integral is conformally invariant, so the lattice in (s, theta) carries the same
// problem while resolving small and large scales alike. Quadrilaterals use a Cartesian
// lattice. Boundary crossings are located exactly along lattice edges; each interior
// node stores the fraction of the edge at which its neighbour link is cut.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <vector>

#include "ringmod/errors.hpp"
#include "ringmod/geometry.hpp"

namespace ringmod {

enum class problem_kind : std::uint8_t { ring, quad };
enum class cell_label : std::uint8_t { interior, boundary0, boundary1, neumann, exterior };

/// What the rasterizer needs from a domain: pieces with boundary conditions, an
/// open-set membership test and a lattice placement.
struct region {
  std::function<bool(point)> contains;
  std::vector<boundary_piece> pieces;
  problem_kind kind = problem_kind::ring;
  bool log_polar = true;
  point center{};       // log-polar origin
  double r_min = 0.0;   // log-polar radial range to cover
  double r_max = 0.0;
  point lo{}, hi{};     // Cartesian bounding box
  point shift{};         // lattice offset in cells, components in [0, 1)
  double truncation = 0.0;  // > 0 when an unbounded outer continuum was cut at |z - center| = truncation
  // Same problem with another lattice offset and the truncation radius scaled.
  std::function<std::shared_ptr<const region>(point shift, double truncation_scale)> rebuild;
};

class lattice {
 public:
  lattice() = default;

  static lattice log_polar(point center, double r_min, double r_max, int angular, point shift = {}) {
    lattice l;
    l.log_polar_ = true;
    l.center_ = center;
    l.h_ = 2.0 * pi / angular;
    l.ny_ = angular;
    l.x0_ = std::log(r_min) - (1.5 + shift.real()) * l.h_;
    l.nx_ = static_cast<int>(std::ceil((std::log(r_max) - l.x0_) / l.h_)) + 2;
    l.y0_ = (0.5 + shift.imag()) * l.h_;
    return l;
  }

  static lattice cartesian(point lo, point hi, int resolution, point shift = {}) {
    lattice l;
    l.log_polar_ = false;
    const double span = std::max(hi.real() - lo.real(), hi.imag() - lo.imag());
    l.h_ = span / resolution;
    l.x0_ = lo.real() - (1.5 + shift.real()) * l.h_;
    l.y0_ = lo.imag() - (1.5 + shift.imag()) * l.h_;
    l.nx_ = static_cast<int>(std::ceil((hi.real() - l.x0_) / l.h_)) + 2;
    l.ny_ = static_cast<int>(std::ceil((hi.imag() - l.y0_) / l.h_)) + 2;
    return l;
  }

  bool is_log_polar() const noexcept { return log_polar_; }
  bool periodic() const noexcept { return log_polar_; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double h() const noexcept { return h_; }
  point center() const noexcept { return center_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t index(int i, int j) const noexcept { return static_cast<std::size_t>(j) * nx_ + i; }

  double u(int i) const noexcept { return x0_ + i * h_; }
  double v(int j) const noexcept { return y0_ + j * h_; }

  point node(int i, int j) const noexcept {
    if (log_polar_) return center_ + std::exp(point(u(i), v(j)));
    return {u(i), v(j)};
  }

  /// Plane point at fractional lattice coordinates.
  point at(double fi, double fj) const noexcept {
    if (log_polar_) return center_ + std::exp(point(x0_ + fi * h_, y0_ + fj * h_));
    return {x0_ + fi * h_, y0_ + fj * h_};
  }

  /// Fractional lattice coordinates of z (v not wrapped).
  std::pair<double, double> coords(point z) const noexcept {
    if (log_polar_) {
      const point w = z - center_;
      double th = std::arg(w);
      if (th < 0) th += 2.0 * pi;
      return {(std::log(std::abs(w)) - x0_) / h_, (th - y0_) / h_};
    }
    return {(z.real() - x0_) / h_, (z.imag() - y0_) / h_};
  }

  /// Size in z of one lattice cell near z.
  double local_cell(point z) const noexcept {
    if (!log_polar_) return h_;
    return h_ * std::max(std::abs(z - center_), std::exp(x0_));
  }

 private:
  bool log_polar_ = false;
  point center_{};
  double h_ = 1.0, x0_ = 0.0, y0_ = 0.0;
  int nx_ = 0, ny_ = 0;
};

/// Link from an interior node to one of its four lattice neighbours. The edge energy is
/// coupling * (u_p - u_q)^2 + w0 * u_p^2 + w1 * (u_p - 1)^2, split between the endpoints.
struct node_link {
  std::int32_t target = -1;  ///< neighbour node index when coupling > 0
  double coupling = 0.0;     ///< share of the dual edge not blocked by the boundary
  double w0 = 0.0;           ///< Dirichlet weight toward boundary 0 (fraction / distance)
  double w1 = 0.0;           ///< Dirichlet weight toward boundary 1
};

class labeled_grid {
 public:
  const lattice& grid() const noexcept { return lattice_; }
  problem_kind kind() const noexcept { return kind_; }
  int resolution() const noexcept { return resolution_; }
  const std::shared_ptr<const region>& source() const noexcept { return source_; }

  /// Per node: true when the node is an unknown of the discrete problem.
  const std::vector<std::uint8_t>& interior() const noexcept { return interior_; }
  /// Per lattice cell (lower-left node index): label.
  const std::vector<cell_label>& cell_labels() const noexcept { return cells_; }
  /// Links of interior nodes; four per node in order +u, -u, +v, -v.
  const std::vector<std::array<node_link, 4>>& links() const noexcept { return links_; }

  std::size_t interior_count() const {
    return static_cast<std::size_t>(std::count(interior_.begin(), interior_.end(), std::uint8_t{1}));
  }
  std::size_t count(cell_label l) const { return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), l)); }

  /// Centre of lattice cell (i, j) in the plane.
  point cell_center(int i, int j) const {
    if (lattice_.is_log_polar())
      return lattice_.center() + std::exp(point(lattice_.u(i) + 0.5 * lattice_.h(), lattice_.v(j) + 0.5 * lattice_.h()));
    return {lattice_.u(i) + 0.5 * lattice_.h(), lattice_.v(j) + 0.5 * lattice_.h()};
  }

 private:
  friend labeled_grid rasterize_region(std::shared_ptr<const region>, int);
  lattice lattice_;
  problem_kind kind_ = problem_kind::ring;
  int resolution_ = 0;
  std::shared_ptr<const region> source_;
  std::vector<std::uint8_t> interior_;
  std::vector<cell_label> cells_;
  std::vector<std::array<node_link, 4>> links_;
};

namespace detail {

struct crossing {
  double t;
  boundary_label label;
};

struct edge_cut {
  bool cut = false;
  crossing first{2.0, boundary_label::neumann};  // nearest to the start node
  crossing last{-1.0, boundary_label::neumann};  // nearest to the end node
  void add(double t, boundary_label l) {
    cut = true;
    // Ties between labels resolve toward boundary 0, then 1, then neumann.
    if (t < first.t || (t == first.t && l < first.label)) first = {t, l};
    if (t > last.t || (t == last.t && l < last.label)) last = {t, l};
  }
};

inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * pi);
  return a < 0 ? a + 2.0 * pi : a;
}

/// Parameters tau in [0,1] where p + tau d meets the circle |z - c| = r.
inline void line_circle(point p, point d, point c, double r, auto&& emit) {
  const point f = p - c;
  const double A = std::norm(d);
  const double B = 2.0 * geom::dot(f, d);
  const double C = std::norm(f) - r * r;
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0 || A == 0.0) return;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (B + std::copysign(sq, B));
  double t1 = q / A;
  double t2 = q != 0.0 ? C / q : t1;
  if (t1 >= 0.0 && t1 <= 1.0) emit(t1);
  if (t2 != t1 && t2 >= 0.0 && t2 <= 1.0) emit(t2);
}

/// Crossings of the unit lattice edge starting at fractional coordinates (fi, fj), along
/// +u [dir 0] or +v [dir 1], with a piece.
inline void edge_crossings(const lattice& L, double fi, double fj, int dir, const boundary_piece& piece, edge_cut& out) {
  const double h = L.h();
  if (!L.is_log_polar() || dir == 0) {
    // Straight edge in the plane (Cartesian edge or radial edge).
    const point a = L.at(fi, fj);
    const point b = dir == 0 ? L.at(fi + 1.0, fj) : L.at(fi, fj + 1.0);
    const double s0 = std::log(std::abs(a - L.center()));
    auto to_param = [&](double tau) {
      if (!L.is_log_polar()) return tau;
      const point z = a + tau * (b - a);
      return (std::log(std::abs(z - L.center())) - s0) / h;
    };
    if (const auto* s = std::get_if<segment_piece>(&piece.shape)) {
      if (auto t = geom::segment_hit(a, b, s->a, s->b)) out.add(std::clamp(to_param(*t), 0.0, 1.0), piece.label);
    } else {
      const auto& c = std::get<circle_piece>(piece.shape);
      line_circle(a, b - a, c.center, c.radius, [&](double tau) { out.add(std::clamp(to_param(tau), 0.0, 1.0), piece.label); });
    }
    return;
  }
  // Arc |z - c| = rho over one angular step.
  const point c0 = L.center();
  const point start = L.at(fi, fj) - c0;
  const double rho = std::abs(start);
  const double v0 = std::arg(start);
  auto emit_angle = [&](point z) {
    const double t = wrap_angle(std::arg(z - c0) - v0) / h;
    if (t <= 1.0) out.add(t, piece.label);
  };
  if (const auto* s = std::get_if<segment_piece>(&piece.shape)) {
    line_circle(s->a, s->b - s->a, c0, rho, [&](double tau) { emit_angle(s->a + tau * (s->b - s->a)); });
  } else {
    const auto& c = std::get<circle_piece>(piece.shape);
    const point d = c.center - c0;
    const double dist = std::abs(d);
    if (dist == 0.0) return;  // concentric: no transversal crossing
    const double a = (rho * rho - c.radius * c.radius + dist * dist) / (2.0 * dist);
    const double hh = rho * rho - a * a;
    if (hh < 0.0) return;
    const point base = c0 + a * d / dist;
    const point perp = point(-d.imag(), d.real()) / dist * std::sqrt(hh);
    emit_angle(base + perp);
    if (hh > 0.0) emit_angle(base - perp);
  }
}

/// Blocking statistics of an edge over parallel copies spread across its dual cell.
struct edge_coverage {
  double open = 1.0;             // fraction of copies that reach the far node
  double fw[2] = {0.0, 0.0};     // Dirichlet weights (labels 0, 1) seen from the start node
  double bw[2] = {0.0, 0.0};     // ... seen from the end node
};

inline constexpr int dual_copies = 8;

struct union_find {
  std::vector<std::int32_t> parent;
  explicit union_find(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::int32_t find(std::int32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace detail

/// Rasterize a prepared region; `resolution` is the angular node count (log-polar) or the
/// number of cells across the longer side of the bounding box (Cartesian).
inline labeled_grid rasterize_region(std::shared_ptr<const region> reg, int resolution) {
  if (resolution < 16) throw rejection("resolution must be at least 16");
  labeled_grid g;
  g.kind_ = reg->kind;
  g.resolution_ = resolution;
  g.source_ = reg;
  const lattice L = reg->log_polar ? lattice::log_polar(reg->center, reg->r_min, reg->r_max, resolution, reg->shift)
                                   : lattice::cartesian(reg->lo, reg->hi, resolution, reg->shift);
  g.lattice_ = L;
  const int nx = L.nx(), ny = L.ny();
  const std::size_t n = L.size();

  // Bucket pieces by the cells they pass near.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> marks;
  for (std::uint32_t pid = 0; pid < reg->pieces.size(); ++pid) {
    const auto& piece = reg->pieces[pid];
    auto mark = [&](point z) {
      const auto [fu, fv] = L.coords(z);
      if (!std::isfinite(fu) || fu < -2.0 || fu > nx + 1.0) return;
      const int ci = static_cast<int>(std::floor(fu));
      const int cj = static_cast<int>(std::floor(fv));
      for (int di = -1; di <= 1; ++di) {
        const int i = ci + di;
        if (i < 0 || i >= nx) continue;
        for (int dj = -1; dj <= 1; ++dj) {
          int j = cj + dj;
          if (L.periodic()) j = ((j % ny) + ny) % ny;
          else if (j < 0 || j >= ny) continue;
          marks.emplace_back(static_cast<std::uint32_t>(L.index(i, j)), pid);
        }
      }
    };
    if (const auto* s = std::get_if<segment_piece>(&piece.shape)) {
      const double len = std::abs(s->b - s->a);
      double tau = 0.0;
      while (true) {
        const point z = s->a + tau * (s->b - s->a);
        mark(z);
        if (tau >= 1.0 || len == 0.0) break;
        tau = std::min(1.0, tau + 0.35 * L.local_cell(z) / len);
      }
    } else {
      const auto& c = std::get<circle_piece>(piece.shape);
      double ang = 0.0;
      while (ang < 2.0 * pi) {
        const point z = c.center + std::polar(c.radius, ang);
        mark(z);
        ang += 0.35 * L.local_cell(z) / c.radius;
      }
    }
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  std::vector<std::uint32_t> bucket_start(n + 1, 0);
  for (const auto& m : marks) ++bucket_start[m.first + 1];
  for (std::size_t k = 0; k < n; ++k) bucket_start[k + 1] += bucket_start[k];

  // Edge crossings: [0] along +u, [1] along +v. The centre copy decides connectivity;
  // parallel copies across the dual cell measure how much of the flux the boundary blocks.
  std::vector<detail::edge_cut> cuts[2] = {std::vector<detail::edge_cut>(n), std::vector<detail::edge_cut>(n)};
  std::vector<detail::edge_coverage> cover[2] = {std::vector<detail::edge_coverage>(n), std::vector<detail::edge_coverage>(n)};
  std::vector<std::uint8_t> partial[2] = {std::vector<std::uint8_t>(n, 0), std::vector<std::uint8_t>(n, 0)};
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = L.index(i, j);
      if (bucket_start[k] == bucket_start[k + 1]) continue;
      for (int dir = 0; dir < 2; ++dir) {
        if (dir == 0 && i + 1 >= nx) continue;
        if (dir == 1 && !L.periodic() && j + 1 >= ny) continue;
        auto crossings = [&](double di, double dj, detail::edge_cut& e) {
          for (std::uint32_t b = bucket_start[k]; b < bucket_start[k + 1]; ++b)
            detail::edge_crossings(L, i + di, j + dj, dir, reg->pieces[marks[b].second], e);
        };
        crossings(0.0, 0.0, cuts[dir][k]);
        // Sample copies across the dual edge; locate status changes between samples by
        // bisection so the blocked measure varies continuously with the geometry.
        struct sample {
          double off;
          int code;  // 0 open, -1 outside the region, else 1 + 3 * first label + last label
          detail::edge_cut e;
        };
        auto probe = [&](double off) {
          sample smp{off, 0, {}};
          crossings(dir == 0 ? 0.0 : off, dir == 0 ? off : 0.0, smp.e);
          if (smp.e.cut) smp.code = 1 + 3 * static_cast<int>(smp.e.first.label) + static_cast<int>(smp.e.last.label);
          else if (!reg->contains(dir == 0 ? L.at(i + 0.5, j + off) : L.at(i + off, j + 0.5))) smp.code = -1;
          return smp;
        };
        constexpr int m = detail::dual_copies;
        std::array<sample, m + 2> smp;
        smp[0] = probe(-0.5);
        for (int c = 0; c < m; ++c) smp[c + 1] = probe((c + 0.5) / m - 0.5);
        smp[m + 1] = probe(0.5);
        double open = 0.0, fmeas[2] = {0.0, 0.0}, bmeas[2] = {0.0, 0.0};
        double ft[2] = {0.0, 0.0}, bt[2] = {0.0, 0.0};
        int fn[2] = {0, 0}, bn[2] = {0, 0};
        auto credit = [&](int code, double len) {
          if (code < 0) return;
          if (code == 0) {
            open += len;
            return;
          }
          const int fl = (code - 1) / 3, bl = (code - 1) % 3;
          if (fl < 2) fmeas[fl] += len;
          if (bl < 2) bmeas[bl] += len;
        };
        for (int c = 0; c <= m; ++c) {
          const auto& x = smp[c];
          const auto& y = smp[c + 1];
          if (x.code == y.code) {
            credit(x.code, y.off - x.off);
            continue;
          }
          double lo = x.off, hi = y.off;
          for (int it = 0; it < 12; ++it) {
            const double mid = 0.5 * (lo + hi);
            (probe(mid).code == x.code ? lo : hi) = mid;
          }
          credit(x.code, lo - x.off);
          credit(y.code, y.off - lo);
        }
        for (int c = 1; c <= m; ++c) {
          const auto& e = smp[c].e;
          if (!e.cut) continue;
          if (e.first.label != boundary_label::neumann) {
            ++fn[static_cast<int>(e.first.label)];
            ft[static_cast<int>(e.first.label)] += e.first.t;
          }
          if (e.last.label != boundary_label::neumann) {
            ++bn[static_cast<int>(e.last.label)];
            bt[static_cast<int>(e.last.label)] += 1.0 - e.last.t;
          }
        }
        // Labels seen only between samples fall back to the centre distance.
        const auto& ce = cuts[dir][k];
        for (int l = 0; l < 2; ++l) {
          if (!fn[l] && fmeas[l] > 0.0) {
            fn[l] = 1;
            ft[l] = ce.cut ? std::max(ce.first.t, 0.5) : 0.5;
          }
          if (!bn[l] && bmeas[l] > 0.0) {
            bn[l] = 1;
            bt[l] = ce.cut ? std::max(1.0 - ce.last.t, 0.5) : 0.5;
          }
        }
        const bool all_open = open >= 1.0;
        auto& cv = cover[dir][k];
        cv.open = std::min(open, 1.0);
        for (int l = 0; l < 2; ++l) {
          if (fmeas[l] > 0.0) cv.fw[l] = fmeas[l] / std::max(ft[l] / fn[l], 1e-6);
          if (bmeas[l] > 0.0) cv.bw[l] = bmeas[l] / std::max(bt[l] / bn[l], 1e-6);
        }
        // Every copy blocked from a side by the centre's label: keep the exact centre distance.
        partial[dir][k] = 1;
        if (ce.cut && open == 0.0) {
          const int fl = static_cast<int>(ce.first.label), bl = static_cast<int>(ce.last.label);
          const bool f_exact = fl < 2 && fmeas[fl] >= 1.0;
          const bool b_exact = bl < 2 && bmeas[bl] >= 1.0;
          partial[dir][k] = !(f_exact && b_exact);
        } else if (all_open && !ce.cut) {
          partial[dir][k] = 0;
        }
      }
    }
  }

  auto neighbor = [&](int i, int j, int dir) -> std::int64_t {
    if (dir == 0) return i + 1 < nx ? static_cast<std::int64_t>(L.index(i + 1, j)) : -1;
    if (j + 1 < ny) return static_cast<std::int64_t>(L.index(i, j + 1));
    return L.periodic() ? static_cast<std::int64_t>(L.index(i, 0)) : -1;
  };

  // Components of nodes connected by uncut edges.
  detail::union_find uf(n);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      for (int dir = 0; dir < 2; ++dir) {
        const auto k = L.index(i, j);
        const auto q = neighbor(i, j, dir);
        if (q >= 0 && !cuts[dir][k].cut) uf.unite(static_cast<std::int32_t>(k), static_cast<std::int32_t>(q));
      }

  // Classify each component with the membership test, preferring nodes far from pieces.
  std::vector<std::int8_t> verdict(n, -1);
  std::vector<std::int32_t> votes_in(n, 0), votes_out(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto root = uf.find(static_cast<std::int32_t>(k));
    if (verdict[root] >= 0) continue;
    const int i = static_cast<int>(k % nx), j = static_cast<int>(k / nx);
    const bool clear = bucket_start[k] == bucket_start[k + 1];
    if (!clear && votes_in[root] + votes_out[root] >= 9) continue;
    const bool in = reg->contains(L.node(i, j));
    if (clear) verdict[root] = in ? 1 : 0;
    else if (votes_in[root] + votes_out[root] < 9) (in ? votes_in : votes_out)[root]++;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto root = static_cast<std::size_t>(uf.find(static_cast<std::int32_t>(k)));
    if (verdict[root] < 0) verdict[root] = votes_in[root] > votes_out[root] ? 1 : 0;
  }

  g.interior_.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) g.interior_[k] = verdict[uf.find(static_cast<std::int32_t>(k))] == 1;
  // Nodes on the non-periodic lattice border never become unknowns.
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (i == 0 || i == nx - 1 || (!L.periodic() && (j == 0 || j == ny - 1))) g.interior_[L.index(i, j)] = 0;

  // A parallel neighbour edge is dead when one of its nodes is not an unknown.
  auto dead_side = [&](int dir, std::size_t e_at, int side) {
    const int i = static_cast<int>(e_at % nx), j = static_cast<int>(e_at / nx);
    int ai, aj, bi, bj;
    if (dir == 0) {
      int jj = j + (side ? 1 : -1);
      if (L.periodic()) jj = (jj + ny) % ny;
      else if (jj < 0 || jj >= ny) return true;
      ai = i, aj = jj, bi = i + 1, bj = jj;
    } else {
      const int ii = i + (side ? 1 : -1);
      if (ii < 0 || ii >= nx) return true;
      int jn = j + 1;
      if (L.periodic()) jn %= ny;
      else if (jn >= ny) return true;
      ai = ii, aj = j, bi = ii, bj = jn;
    }
    if (bi >= nx) return true;
    return !(g.interior_[L.index(ai, aj)] && g.interior_[L.index(bi, bj)]);
  };
  // Open measure of the half cell beyond the dual edge on one side, for edges next to a
  // dead neighbour: the flux there has no other edge to carry it.
  auto band_open = [&](int dir, std::size_t e_at, double a, double b) {
    const int i = static_cast<int>(e_at % nx), j = static_cast<int>(e_at / nx);
    auto code = [&](double off) {
      detail::edge_cut e;
      for (std::uint32_t q = bucket_start[e_at]; q < bucket_start[e_at + 1]; ++q)
        detail::edge_crossings(L, i + (dir == 0 ? 0.0 : off), j + (dir == 0 ? off : 0.0), dir, reg->pieces[marks[q].second], e);
      if (e.cut) return 1;
      return reg->contains(dir == 0 ? L.at(i + 0.5, j + off) : L.at(i + off, j + 0.5)) ? 0 : -1;
    };
    constexpr int mb = detail::dual_copies / 2;
    double acc = 0.0, prev_off = a;
    int prev = code(a);
    for (int c = 1; c <= mb; ++c) {
      const double off = a + (b - a) * c / mb;
      const int cur = code(off);
      if (prev == cur) {
        if (cur == 0) acc += off - prev_off;
      } else {
        double lo = prev_off, hi = off;
        for (int it = 0; it < 12; ++it) {
          const double mid = 0.5 * (lo + hi);
          (code(mid) == prev ? lo : hi) = mid;
        }
        if (prev == 0) acc += lo - prev_off;
        if (cur == 0) acc += off - lo;
      }
      prev = cur;
      prev_off = off;
    }
    return std::abs(acc);
  };
  std::vector<float> spill_memo[2] = {std::vector<float>(n, -1.0f), std::vector<float>(n, -1.0f)};
  auto spill = [&](int dir, std::size_t e_at) -> double {
    if (bucket_start[e_at] == bucket_start[e_at + 1]) return 0.0;
    auto& memo = spill_memo[dir][e_at];
    if (memo < 0.0f) {
      double extra = 0.0;
      if (dead_side(dir, e_at, 0)) extra += band_open(dir, e_at, -1.0, -0.5);
      if (dead_side(dir, e_at, 1)) extra += band_open(dir, e_at, 0.5, 1.0);
      memo = static_cast<float>(extra);
    }
    return memo;
  };

  // Links.
  g.links_.assign(n, {});
  auto set_link = [&](std::size_t k, int slot, std::int64_t q, std::size_t e_at, int dir, bool forward) {
    const auto& e = cuts[dir][e_at];
    const auto& cv = cover[dir][e_at];
    node_link link;
    const bool q_in = q >= 0 && g.interior_[q];
    auto centre_crossing = [&] {
      const auto c = forward ? e.first : detail::crossing{1.0 - e.last.t, e.last.label};
      if (c.label == boundary_label::zero) link.w0 = 1.0 / std::max(c.t, 1e-6);
      if (c.label == boundary_label::one) link.w1 = 1.0 / std::max(c.t, 1e-6);
    };
    if (!partial[dir][e_at]) {
      if (!e.cut) {
        if (q_in) {
          link.target = static_cast<std::int32_t>(q);
          link.coupling = 1.0 + spill(dir, e_at);
        }
      } else {
        centre_crossing();
      }
    } else if (q_in) {
      const double c = cv.open + spill(dir, e_at);
      if (c > 0.0) {
        link.target = static_cast<std::int32_t>(q);
        link.coupling = c;
      }
      link.w0 = forward ? cv.fw[0] : cv.bw[0];
      link.w1 = forward ? cv.fw[1] : cv.bw[1];
    } else if (e.cut) {
      centre_crossing();
    }
    g.links_[k][slot] = link;
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const auto k = L.index(i, j);
      if (!g.interior_[k]) continue;
      set_link(k, 0, neighbor(i, j, 0), k, 0, true);
      if (i > 0) set_link(k, 1, static_cast<std::int64_t>(L.index(i - 1, j)), L.index(i - 1, j), 0, false);
      if (j + 1 < ny || L.periodic()) set_link(k, 2, neighbor(i, j, 1), k, 1, true);
      const int jm = j > 0 ? j - 1 : (L.periodic() ? ny - 1 : -1);
      if (jm >= 0) set_link(k, 3, static_cast<std::int64_t>(L.index(i, jm)), L.index(i, jm), 1, false);
    }
  }

  // Drop groups of unknowns with no Dirichlet contact (their potential is undetermined).
  {
    detail::union_find linked(n);
    for (std::size_t k = 0; k < n; ++k)
      if (g.interior_[k])
        for (const auto& l : g.links_[k])
          if (l.coupling > 0.0) linked.unite(static_cast<std::int32_t>(k), l.target);
    std::vector<std::uint8_t> anchored(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
      if (!g.interior_[k]) continue;
      for (const auto& l : g.links_[k])
        if (l.w0 > 0.0 || l.w1 > 0.0) anchored[linked.find(static_cast<std::int32_t>(k))] = 1;
    }
    for (std::size_t k = 0; k < n; ++k)
      if (g.interior_[k] && !anchored[linked.find(static_cast<std::int32_t>(k))]) {
        g.interior_[k] = 0;
        g.links_[k] = {};
      }
  }

  // Cell labels: a cell whose edges are cut takes the boundary label (0 before 1 before
  // neumann); otherwise interior when all four corners are unknowns, else exterior.
  g.cells_.assign(n, cell_label::exterior);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const auto k = L.index(i, j);
      if (i + 1 >= nx || (!L.periodic() && j + 1 >= ny)) continue;
      const int jn = (j + 1) % ny;
      const detail::edge_cut* edges[4] = {&cuts[0][k], &cuts[1][k], &cuts[0][L.index(i, jn)], &cuts[1][L.index(i + 1, j)]};
      int best = 3;
      for (const auto* e : edges)
        if (e->cut) best = std::min({best, static_cast<int>(e->first.label), static_cast<int>(e->last.label)});
      const std::size_t corners[4] = {k, L.index(i + 1, j), L.index(i, jn), L.index(i + 1, jn)};
      const bool touches = std::any_of(std::begin(corners), std::end(corners), [&](std::size_t c) { return g.interior_[c] != 0; });
      if (best < 3 && touches) {
        g.cells_[k] = best == 0 ? cell_label::boundary0 : best == 1 ? cell_label::boundary1 : cell_label::neumann;
      } else if (std::all_of(std::begin(corners), std::end(corners), [&](std::size_t c) { return g.interior_[c] != 0; })) {
        g.cells_[k] = cell_label::interior;
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Region builders

struct ring_options {
  double truncation_factor = 50.0;  ///< outer cut radius for unbounded rings, times the largest feature
  double inner_cut = 1e-3;          ///< inner cut radius for thin continua, times the largest feature
  point shift{};                    ///< lattice offset in cells
};

/// Region of a ring domain: inner continuum labeled 0, outer labeled 1.
inline std::shared_ptr<const region> ring_region(const ring_domain_spec& ring, const ring_options& opt = {}) {
  auto reg = std::make_shared<region>();
  reg->kind = problem_kind::ring;
  reg->log_polar = true;
  reg->shift = opt.shift;
  const auto [c, anchor_r] = ring.inner_anchor();
  reg->center = c;
  const double feature = ring.feature_radius(c);
  double inner_cut = 0.0;
  if (anchor_r > 0.0) {
    reg->r_min = 0.5 * anchor_r;
  } else {
    inner_cut = opt.inner_cut * feature;
    reg->r_min = inner_cut;
  }
  double trunc = 0.0;
  if (!ring.outer_bounded()) {
    trunc = opt.truncation_factor * feature;
    reg->r_max = trunc;
  } else {
    reg->r_max = feature;
  }
  reg->truncation = trunc;
  reg->pieces = ring.pieces(trunc + std::abs(c) + feature);
  if (inner_cut > 0.0) reg->pieces.push_back({circle_piece{c, inner_cut}, boundary_label::zero});
  if (trunc > 0.0) reg->pieces.push_back({circle_piece{c, trunc}, boundary_label::one});
  reg->contains = [ring, c, inner_cut, trunc](point z) {
    const double d = std::abs(z - c);
    if (d <= inner_cut) return false;
    if (trunc > 0.0 && d >= trunc) return false;
    return ring.contains(z);
  };
  reg->rebuild = [ring, opt](point shift, double scale) {
    ring_options o = opt;
    o.shift = shift;
    o.truncation_factor *= scale;
    return ring_region(ring, o);
  };
  return reg;
}

/// Region of a quadrilateral: side a -> 0, side c -> 1, sides b, d Neumann.
inline std::shared_ptr<const region> quad_region(const quadrilateral_spec& q, point shift = {}) {
  auto reg = std::make_shared<region>();
  reg->kind = problem_kind::quad;
  reg->log_polar = false;
  reg->pieces = q.pieces();
  point lo = q.vertices().front(), hi = lo;
  for (auto v : q.vertices()) {
    lo = {std::min(lo.real(), v.real()), std::min(lo.imag(), v.imag())};
    hi = {std::max(hi.real(), v.real()), std::max(hi.imag(), v.imag())};
  }
  reg->lo = lo;
  reg->hi = hi;
  reg->shift = shift;
  reg->contains = [verts = q.vertices()](point z) { return geom::point_in_polygon(z, verts); };
  reg->rebuild = [q](point s, double) { return quad_region(q, s); };
  return reg;
}

namespace detail {
inline void require_two_labels(const labeled_grid& g) {
  if (g.interior_count() == 0) throw rejection("degenerate ring: the rasterized region is empty");
  if (g.count(cell_label::boundary0) == 0 || g.count(cell_label::boundary1) == 0)
    throw rejection("degenerate ring: both boundary components must be present");
}
}  // namespace detail

inline labeled_grid rasterize(const ring_domain_spec& ring, int resolution, const ring_options& opt = {}) {
  auto g = rasterize_region(ring_region(ring, opt), resolution);
  detail::require_two_labels(g);
  return g;
}

inline labeled_grid rasterize(const quadrilateral_spec& q, int resolution) {
  auto g = rasterize_region(quad_region(q), resolution);
  detail::require_two_labels(g);
  return g;
}

}  // namespace ringmod
