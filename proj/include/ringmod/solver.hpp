#pragma once

// Discrete Dirichlet problem on a labeled grid.
//
// Unknowns are interior nodes. A lattice edge contributes c (u_p - u_q)^2 to the energy,
// c being the unblocked share of its dual edge; a Dirichlet crossing at fraction t adds
// (u_p - g)^2 / t, weighted by the share of the dual edge it blocks.
// The minimizer solves a symmetric positive definite system, handled by preconditioned
// conjugate gradients; each iterate lowers the energy.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ringmod/errors.hpp"
#include "ringmod/grid.hpp"

namespace ringmod {

struct solver_options {
  double tolerance = 1e-10;     ///< relative residual
  int max_iterations = 100000;
  bool record_energy = false;   ///< keep the energy of every iterate
};

struct harmonic_solution {
  std::vector<double> potential;  ///< per lattice node; NaN off the unknowns
  double residual = 0.0;
  int iterations = 0;
  double energy = 0.0;
  std::vector<double> energy_history;
};

namespace detail {

struct dirichlet_system {
  std::vector<std::int32_t> node;            // unknown -> lattice node
  std::vector<std::array<std::int32_t, 4>> nb;  // unknown neighbours (-1 none)
  std::vector<std::array<double, 4>> wc;        // coupling weights
  std::vector<double> diag, rhs, w0, w1;

  explicit dirichlet_system(const labeled_grid& g) {
    const auto& interior = g.interior();
    std::vector<std::int32_t> id(interior.size(), -1);
    for (std::size_t k = 0; k < interior.size(); ++k)
      if (interior[k]) {
        id[k] = static_cast<std::int32_t>(node.size());
        node.push_back(static_cast<std::int32_t>(k));
      }
    const std::size_t m = node.size();
    nb.assign(m, {-1, -1, -1, -1});
    wc.assign(m, {0.0, 0.0, 0.0, 0.0});
    diag.assign(m, 0.0);
    rhs.assign(m, 0.0);
    w0.assign(m, 0.0);
    w1.assign(m, 0.0);
    for (std::size_t u = 0; u < m; ++u) {
      const auto& links = g.links()[node[u]];
      for (int s = 0; s < 4; ++s) {
        const auto& l = links[s];
        if (l.coupling > 0.0 && l.target >= 0 && id[l.target] >= 0) {
          nb[u][s] = id[l.target];
          wc[u][s] = l.coupling;
          diag[u] += l.coupling;
        }
        w0[u] += l.w0;
        w1[u] += l.w1;
      }
      diag[u] += w0[u] + w1[u];
      rhs[u] = w1[u];
    }
  }

  std::size_t size() const { return node.size(); }

  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    const std::size_t m = size();
    for (std::size_t u = 0; u < m; ++u) {
      double acc = diag[u] * x[u];
      for (int s = 0; s < 4; ++s)
        if (nb[u][s] >= 0) acc -= wc[u][s] * x[nb[u][s]];
      y[u] = acc;
    }
  }

  double energy(const std::vector<double>& x) const {
    double e = 0.0;
    for (std::size_t u = 0; u < size(); ++u) {
      for (int s = 0; s < 4; ++s) {
        const auto q = nb[u][s];
        if (q > static_cast<std::int32_t>(u)) {
          const double d = x[u] - x[q];
          e += wc[u][s] * d * d;
        }
      }
      e += w0[u] * x[u] * x[u] + w1[u] * (x[u] - 1.0) * (x[u] - 1.0);
    }
    return e;
  }
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

inline harmonic_solution solve_harmonic(const labeled_grid& g, const solver_options& opt = {},
                                        const std::vector<double>* initial = nullptr) {
  const detail::dirichlet_system sys(g);
  const std::size_t m = sys.size();
  if (m == 0) throw rejection("grid has no interior nodes");

  std::vector<double> x(m, 0.5), r(m), z(m), p(m), ap(m);
  if (initial)
    for (std::size_t u = 0; u < m; ++u) {
      const double v = (*initial)[sys.node[u]];
      if (std::isfinite(v)) x[u] = v;
    }
  harmonic_solution sol;
  if (opt.record_energy) sol.energy_history.push_back(sys.energy(x));

  sys.apply(x, ap);
  for (std::size_t u = 0; u < m; ++u) r[u] = sys.rhs[u] - ap[u];
  const double bnorm = std::sqrt(std::max(detail::dot(sys.rhs, sys.rhs), 1e-300));
  for (std::size_t u = 0; u < m; ++u) z[u] = r[u] / sys.diag[u];
  p = z;
  double rz = detail::dot(r, z);
  double rnorm = std::sqrt(detail::dot(r, r));
  int it = 0;
  while (rnorm / bnorm > opt.tolerance && it < opt.max_iterations) {
    sys.apply(p, ap);
    const double alpha = rz / detail::dot(p, ap);
    for (std::size_t u = 0; u < m; ++u) {
      x[u] += alpha * p[u];
      r[u] -= alpha * ap[u];
      z[u] = r[u] / sys.diag[u];
    }
    const double rz_new = detail::dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t u = 0; u < m; ++u) p[u] = z[u] + beta * p[u];
    rnorm = std::sqrt(detail::dot(r, r));
    ++it;
    if (opt.record_energy) sol.energy_history.push_back(sys.energy(x));
  }
  sol.residual = rnorm / bnorm;
  sol.iterations = it;
  if (sol.residual > opt.tolerance)
    throw diagnostic("linear solve did not converge: relative residual " + std::to_string(sol.residual), sol.residual);

  sol.energy = sys.energy(x);
  sol.potential.assign(g.interior().size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t u = 0; u < m; ++u) sol.potential[sys.node[u]] = x[u];
  return sol;
}

}  // namespace ringmod
